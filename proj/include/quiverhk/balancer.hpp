#pragma once

#include <vector>

#include "quiverhk/quiver.hpp"

namespace quiverhk {

// Special: product of SU(i) factors, the trace of each defect is left alone.
// Unitary: product of U(i) factors, defects are measured against lambda^R.
enum class GaugeGroup { Special, Unitary };

struct BalanceParams {
    double tol = 1e-9;
    int max_iter = 50000;
    double step0 = 0.1;
    double backtrack = 0.5;
    double armijo = 1e-4;
    double max_step = 1e6;
    GaugeGroup group = GaugeGroup::Unitary;
};

struct TraceRow {
    int iter;
    double energy;
    double residual;
    double step;
};

struct BalanceReport {
    Quiver quiver;
    std::vector<CMatrix> gauge;  // accumulated g_1..g_n (g_n = I)
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> energy_trace;
    std::vector<TraceRow> trace;
};

class MaxIterExceeded : public SolverError {
public:
    MaxIterExceeded(const std::string& what, BalanceReport best)
        : SolverError(what), report(std::move(best)) {}
    BalanceReport report;
};

// Node defects D_1..D_{n-1}; trace-free for Special, shifted by lambda^R for Unitary.
std::vector<CMatrix> balance_defects(const Quiver& q, const MomentScalars& target, GaugeGroup group);

double kempf_ness_energy(const Quiver& q, const MomentScalars& target, GaugeGroup group);

// Max Frobenius norm of the defects (the quantity compared against tol).
double balance_residual(const Quiver& q, const MomentScalars& target, GaugeGroup group);

BalanceReport balance(const Quiver& q, const MomentScalars& target, const BalanceParams& params = {});

// i (alpha_{n-1} alpha_{n-1}^* - beta_{n-1}^* beta_{n-1}) for a quiver balanced at lambda^R = 0.
CMatrix phi_from_quiver(const Quiver& q);

}  // namespace quiverhk
