#pragma once

// Object-clock interaction operators, the chronological semi-tensor
// propagator on chains, the jump-equation evolution, and the expectation
// routes to the object propagator: vacuum/Dyson series, Picard iteration,
// and pseudo-Poisson Monte Carlo.

#include <cstdint>
#include <vector>

#include "chronon/complex_matrix.hpp"
#include "chronon/guichardet.hpp"
#include "chronon/object_space.hpp"

namespace chronon {

/// 2x2 block matrix with object-operator entries, acting on the object space
/// tensored with one clock spin. Blocks are indexed (past, future).
struct BlockMatrix2 {
    CMatrix a, b, c, d;  // [[a, b], [c, d]]

    static BlockMatrix2 identity(int dim);
    /// Canonical interaction [[I, G], [0, I]]; pseudo-unitary iff G^* = -G.
    static BlockMatrix2 canonical_sigma(const CMatrix& g);

    int dim() const { return a.rows(); }

    BlockMatrix2 dag() const;  // [[d*, b*], [c*, a*]] blockwise adjoints
    bool is_pseudo_unitary(double tol) const;
    CMatrix to_dense() const;  // 2 dim x 2 dim, past rows first
};

BlockMatrix2 operator*(const BlockMatrix2& x, const BlockMatrix2& y);
BlockMatrix2 operator-(const BlockMatrix2& x, const BlockMatrix2& y);

/// Conjugation by the boost diag(1/sqrt(lambda), sqrt(lambda)) (x) I:
/// [[a, b/lambda], [lambda c, d]]. Applied to the canonical sigma with
/// lambda = nu it yields [[I, G/nu], [0, I]].
BlockMatrix2 boost_conjugate(const BlockMatrix2& m, double lambda);

/// Compression against the pseudo-vacuum spin, <future-dual| m |future>;
/// equals the upper-right block. For the canonical sigma this is G.
CMatrix vacuum_compression(const BlockMatrix2& m);

/// Compression against the symmetric state (1,1)/sqrt(2): (a+b+c+d)/2.
/// For the boosted interaction this is I + G/(2 nu).
CMatrix poisson_compression(const BlockMatrix2& m);

/// Interaction operator at time x: [[I, -iH(x)], [0, I]].
BlockMatrix2 sigma_at(const HamiltonianSchedule& schedule, double x);

/// Object state with explicit past/future clock components.
struct ObjectSpinor {
    std::vector<cplx> past, future;

    static ObjectSpinor future_input(std::vector<cplx> eta);
};

/// One object-clock interaction at time x: the future component feeds
/// G(x) eta into the past component and is itself unchanged; a pure past
/// input passes through untouched.
ObjectSpinor apply_single_interaction(const HamiltonianSchedule& schedule, double x,
                                      const ObjectSpinor& in);

/// State over a fixed chain: one object vector per spin assignment of the
/// chain's points. Bit j of the index is the spin of point j
/// (0 = past, 1 = future). At most 12 points.
class DilatedState {
public:
    DilatedState(Chain chain, int dim);
    /// eta tensored with all points in the future state.
    static DilatedState vacuum_input(Chain chain, std::vector<cplx> eta);

    const Chain& chain() const { return chain_; }
    int dim() const { return dim_; }
    size_t n_components() const { return amps_.size(); }

    std::vector<cplx>& amp(size_t spin_mask) { return amps_.at(spin_mask); }
    const std::vector<cplx>& amp(size_t spin_mask) const { return amps_.at(spin_mask); }

    /// Apply sigma(x) acting on the object and the clock slot `slot`.
    void apply_sigma_at_slot(const CMatrix& g, size_t slot);

    double max_abs_diff(const DilatedState& o) const;

private:
    Chain chain_;
    int dim_;
    std::vector<std::vector<cplx>> amps_;
};

/// Ordered product of sigma(x) factors over the chain points x <= t, each
/// acting on its own clock slot, earliest first (later factors to the left).
class ChainPropagator {
public:
    ChainPropagator(const HamiltonianSchedule& schedule, Chain chain, double t);

    void apply(DilatedState& state) const;
    /// Dense matrix on object (x) (C^2)^n; intended for small chains only.
    CMatrix dense() const;

private:
    const HamiltonianSchedule* schedule_;
    Chain chain_;
    double t_;
};

struct CountingRecord {
    double t = 0.0;
    int count = 0;  // interactions applied up to and including t
};

struct JumpTrajectory {
    std::vector<double> times;
    std::vector<DilatedState> states;
    std::vector<CountingRecord> counts;
};

/// Piecewise-constant evolution of the jump equation on the given chain:
/// at each grid time the state equals the chain propagator applied to the
/// vacuum input. The count jumps by one exactly at chain points (counted
/// right-continuously, so a point x is applied once t >= x).
JumpTrajectory jump_evolution(const HamiltonianSchedule& schedule, const Chain& chain,
                              const std::vector<double>& t_grid, std::vector<cplx> eta);

/// Truncated series sum_{n<=order} int over the ordered n-simplex of
/// G(x_n)...G(x_1). Sectors up to `quad_sector_cap` are done by iterated
/// Gauss-Legendre quadrature; higher sectors by the term recursion
/// dT_n/dx = G(x) T_{n-1} integrated with RK4 in `tail_steps` steps.
PropagatorEstimate vacuum_expectation_dyson(const HamiltonianSchedule& schedule, double t,
                                            int order, int nodes = 10, int quad_sector_cap = 4,
                                            int tail_steps = 2048);

/// N-th iterate of V <- I + int_0^t G V on a uniform grid with a cumulative
/// third-order rule; agrees with the Dyson sum at equal order.
PropagatorEstimate picard_propagator(const HamiltonianSchedule& schedule, double t, int order,
                                     int steps = 2048);

/// Chronological product of (I + G(x)/(2 nu(x))) over the chain, earliest
/// factor rightmost.
CMatrix compressed_chain_weight(const HamiltonianSchedule& schedule,
                                const IntensityProfile& intensity, const Chain& chain, double t);

/// Monte Carlo average of compressed_chain_weight over chains drawn from the
/// Poisson law with rate 2 nu. Entrywise standard errors from `batches`
/// batch means. The reduction shape is fixed by (samples, batches) alone, so
/// results are bit-identical for any thread count.
PropagatorEstimate poisson_expectation_mc(const HamiltonianSchedule& schedule,
                                          const IntensityProfile& intensity, double t,
                                          long long samples, std::uint64_t seed, int threads = 1,
                                          int batches = 20);

/// Compression of the tensor-level chain propagator against the pseudo-vacuum
/// product state; must equal the ordered product of G(x) over the chain.
CMatrix compressed_via_tensor(const HamiltonianSchedule& schedule, const Chain& chain, double t);

/// Sum over sectors n <= order of the simplex quadrature of the tensor-route
/// compression, compared against the reference propagator (max-entry norm).
/// Exercises the same series as vacuum_expectation_dyson through the
/// tensor-level machinery.
double earth_projection_defect(const HamiltonianSchedule& schedule, double t, int order,
                               int nodes, int ref_steps);

/// Max over the given chains of the distance between the tensor-route
/// compression and the ordered product of generators.
double max_compression_defect(const HamiltonianSchedule& schedule, const std::vector<Chain>& chains,
                              double t);

}  // namespace chronon
