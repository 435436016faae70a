#pragma once

#include "splitkit/algorithms.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace splitkit {

// ---------------------------------------------------------------- block schedules

// Activation data of one iteration. Indices are 0-based; pi[j] is π_i(n) for i = I[j],
// omega[j] is ω_k(n) for k = K[j].
struct BlockStep {
    std::vector<int> I, K;
    std::vector<int> pi, omega;
};

// Control sequences (I_n, K_n, π, ω) with coverage window R and delay bound T.
// steps[n] is used for n < steps.size(); afterwards every operator is activated on
// current data (I_n = I, K_n = K, π = ω = n), which satisfies both assumptions.
struct BlockSchedule {
    int m = 1, p = 1;
    int R = 1, T = 0;
    std::vector<BlockStep> steps;

    BlockStep step(int n) const;
};

enum class BlockScheduleKind { Full, RoundRobin, RandomWithCover };

BlockScheduleKind parse_block_schedule_kind(const std::string& s);
std::string to_string(BlockScheduleKind k);

BlockSchedule make_block_schedule(BlockScheduleKind kind, int m, int p, int R, int T, std::uint64_t seed = 0,
                                  int horizon = 20000);

// Empty result means the schedule satisfies I_0 = I, K_0 = K, the R-window coverage
// and n−T ≤ π_i(n), ω_k(n) ≤ n.
std::vector<std::string> validate_block_schedule(const BlockSchedule& s);
// Throws ParameterError listing the violations.
void require_valid_schedule(const BlockSchedule& s);

// Line format, 1-based operator names:
//   # m=2 p=1 R=2 T=3
//   0 | I: i1,i2 | K: k1 | pi: i1=n,i2=n | omega: k1=n
//   1 | I: i2 | K: k1 | pi: i2=n-1 | omega: k1=n
// Delays may be written as n, n-d or an absolute iteration number. Missing entries mean n.
BlockSchedule read_block_schedule(std::istream& is);
BlockSchedule read_block_schedule_file(const std::string& path);
void write_block_schedule(const BlockSchedule& s, std::ostream& os);

// ---------------------------------------------------------------- Kuhn–Tucker projective splitting

// 0 ∈ A_i x_i + Σ_k L_ki*(B_k(Σ_j L_kj x_j)). L[k][i] : H_i → G_k; a default-constructed
// LinOp stands for the zero block.
struct KTProblem {
    std::vector<OperatorSpec> A;
    std::vector<OperatorSpec> B;
    std::vector<std::vector<LinOp>> L;

    int m() const { return static_cast<int>(A.size()); }
    int p() const { return static_cast<int>(B.size()); }
    SpaceLayout primal_layout() const;
    SpaceLayout dual_layout() const;
    Vec apply_L(int k, const Vec& x) const;          // Σ_i L_ki x_i, x flat over H
    Vec apply_Lt(int i, const Vec& ys) const;        // Σ_k L_ki* y*_k, ys flat over G
};

// Last graph points (a_i, a_i*) ∈ gra A_i and (b_k, b_k*) ∈ gra B_k, with the iteration
// whose data produced them.
struct GraphCache {
    std::vector<Vec> a, a_star, b, b_star;
    std::vector<int> a_stamp, b_stamp;
};

struct KTParams {
    std::vector<Schedule> gamma;  // per i
    std::vector<Schedule> sigma;  // per k
};

// Residual of the Kuhn–Tucker inclusion at (x, y*) from unit-step resolvents:
// (Σ‖x_i − J_{A_i}(x_i − Σ L_ki*y*_k)‖², Σ‖Lx_k − J_{B_k}(Lx_k + y*_k)‖²).
std::pair<double, double> kt_residual(const KTProblem& P, const Vec& x, const Vec& ys);

// State (x_1..x_m, y*_1..y*_p). cut.aux holds a_1..a_m, a*_1..a*_m, b_1..b_p, b*_1..b*_p.
RunResult run_block_kt_projective(const KTProblem& P, const BlockSchedule& sched, const KTParams& par,
                                  const LoopConfig& cfg, const Vec& x0, const Vec& ys0);

// Two-operator case: 0 ∈ Ax + L*B(Lx).
RunResult run_kt_projective(const OperatorSpec& A, const OperatorSpec& B, const LinOp& L, const Schedule& gamma,
                            const Schedule& sigma, const LoopConfig& cfg, const Vec& x0, const Vec& ys0);

// ---------------------------------------------------------------- saddle projective splitting

// Empty operators are zero. C carries a cocoercivity constant, Q a Lipschitz constant.
struct SaddlePrimalBlock {
    OperatorSpec A, C, Q;
};

// (Bm + Bc + Bl) □ (Dm + Dc + Dl). For a plain B_k use plain(): D_k = N_{0}, so z_k = 0.
struct SaddleDualBlock {
    OperatorSpec Bm, Bc, Bl, Dm, Dc, Dl;
    static SaddleDualBlock plain(OperatorSpec B, Index dim);
};

struct SaddleProblem {
    std::vector<SaddlePrimalBlock> primal;
    std::vector<SaddleDualBlock> dual;
    OperatorSpec R;                      // H → H monotone χ-Lipschitz, empty for 0
    std::vector<std::vector<LinOp>> L;   // L[k][i]

    int m() const { return static_cast<int>(primal.size()); }
    int p() const { return static_cast<int>(dual.size()); }
    SpaceLayout primal_layout() const;
    SpaceLayout dual_layout() const;
    // (x, y, z, v*)
    SpaceLayout state_layout() const;
};

struct SaddleParams {
    double sigma = 1.0;               // σ > 1/(4α)
    std::vector<Schedule> gamma;      // per i, in [ε, 1/(α_i^l + χ + σ)]
    std::vector<Schedule> mu;         // per k, in [ε, 1/(β_k^l + σ)]
    std::vector<Schedule> rho;        // per k, in [ε, 1/(δ_k^l + σ)]
    std::vector<Schedule> sigma_k;    // per k, in [ε, 1/ε]
    // λ_n = γ‖p*‖²/Δ_n; with I = K = {1}, R = 0, L = 0 the x-iterates are those of FBHF.
    bool fbhf_relaxation = false;
};

// Forward-backward residual of the saddle operator at unit step.
double saddle_residual(const SaddleProblem& P, const Vec& state);

// State (x, y, z, v*). pd.x = x, pd.y_star = v*. cut.aux holds a_1..a_m, a*_1..a*_m.
RunResult run_saddle_projective(const SaddleProblem& P, const BlockSchedule& sched, const SaddleParams& par,
                                const LoopConfig& cfg, const Vec& x0, const Vec& y0, const Vec& z0, const Vec& vs0);

// min_u max_v f(u) + ½⟨Pu,u⟩ + ⟨Mv,u⟩ − ½⟨Nv,v⟩ − g(v), with P, N ⪰ 0. R = (∇_u F, −∇_v F).
SaddleProblem minimax_saddle_problem(const OperatorSpec& df, const OperatorSpec& dg, const Mat& P, const Mat& M,
                                     const Mat& N);

}  // namespace splitkit
