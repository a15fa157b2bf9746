#pragma once

#include <array>
#include <vector>

#include "quiverhk/hypertoric.hpp"
#include "quiverhk/quiver.hpp"

namespace quiverhk {

using SetPartition = std::vector<std::vector<int>>;  // 1-based, blocks sorted by minimum

struct StratumLabel {
    SetPartition partition;
    std::vector<std::vector<int>> orbits;  // Jordan partition per block of `partition`
    bool operator==(const StratumLabel& o) const
    {
        return partition == o.partition && orbits == o.orbits;
    }
};

struct Classification {
    StratumLabel label;
    cplx u = 1.0;
    cplx v = 0.0;  // rotation applied before reading the label
};

using Lambda3 = std::array<double, 3>;  // (Re lambda^C, Im lambda^C, lambda^R)

std::vector<Lambda3> lambda_triples(const MomentScalars& s);

SetPartition partition_from_lambda(const std::vector<Lambda3>& lambda, double tol = 1e-8);

bool in_Q_circle(const Quiver& q, double tol = 1e-8);

// Identity, then 12 icosahedron and 4 tetrahedron directions lifted to SU(2).
std::vector<std::pair<cplx, cplx>> rotation_sample();

// Label of a quiver already in Q°.
StratumLabel label_in_Q_circle(const Quiver& q, double tol = 1e-8);

Classification classify(const Quiver& q, double tol = 1e-8);

// Chain of vector spaces W_0 -> W_1 -> ... -> W_L (dims[e]) with alpha[e] : W_e -> W_{e+1}
// and beta[e] : W_{e+1} -> W_e.  Node e < L carries the equation
// alpha[e-1] beta[e-1] - beta[e] alpha[e] = lambda_e I (alpha[-1] = 0).
struct QuiverSegment {
    std::vector<int> dims;
    std::vector<CMatrix> alpha;
    std::vector<CMatrix> beta;

    int length() const { return static_cast<int>(dims.size()) - 1; }
    void validate() const;
};

QuiverSegment segment_of(const Quiver& q);

// alpha[e-1] beta[e-1] on W_e (zero for e = 0).
CMatrix segment_node_operator(const QuiverSegment& s, int e);
CMatrix segment_top_product(const QuiverSegment& s);

// Scalars lambda_0..lambda_{L-1} by traces, plus the worst trace-free defect.
std::pair<CVector, double> segment_scalars(const QuiverSegment& s);
double segment_complex_residual(const QuiverSegment& s, const CVector& lambda);

struct EigenFamily {
    cplx label;                 // tau_m - nu_m, constant along the chain
    std::vector<CMatrix> basis; // basis[m-1] : orthonormal columns in V_m, m = 1..n
    QuiverSegment segment;      // restricted maps, nodes 1..n (dims may be 0)
    double leakage = 0.0;
};

std::vector<EigenFamily> decompose_by_eigenspaces(const Quiver& q, double tol = 1e-8);

// Merge across edge e.  Interior edges compose their neighbours; the top edge folds
// into the top node, shifting the top product by lambda_e.
QuiverSegment contract_edge(const QuiverSegment& s, int e);

// Contract, top down, every edge whose alpha and beta are both isomorphisms.
QuiverSegment contract_isomorphisms(const QuiverSegment& s, double tol = 1e-8);

}  // namespace quiverhk
