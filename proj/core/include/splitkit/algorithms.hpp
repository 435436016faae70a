#pragma once

#include "splitkit/engine.hpp"
#include "splitkit/operators.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace splitkit {

struct PrimalDualPair {
    Vec x;
    Vec y_star;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

struct RunResult {
    Vec z;               // final engine-space iterate
    PrimalDualPair pd;
    RunTrace trace;
};

// Renorming kernel for PPA/FB. `warped(γ, x)` returns (γ⁻¹U + M)⁻¹(γ⁻¹Ux) for PPA and
// (γ⁻¹U + A)⁻¹(γ⁻¹Ux − Bx) for FB; when empty, M (resp. A) must be affine and a dense
// solve is used.
struct KernelResolvent {
    MetricKernel U;
    std::function<Vec(double, const Vec&)> warped;
};

// ---------------------------------------------------------------- embeddings

// (X, 𝓜, 𝓣): 𝓜 = Σ terms on X, recover = 𝓣 with 𝓣(zer 𝓜) ⊂ zer M.
struct Embedding {
    enum class Kind { Spingarn, KuhnTucker, Saddle, ProductDual };
    Kind kind;
    SpaceLayout layout;
    std::vector<OperatorSpec> terms;
    std::function<Vec(const Vec&)> recover;
    std::string tag;
};

Embedding::Kind parse_embedding_kind(const std::string& s);

// Spingarn: X = H^p, 𝓜 = A_1 × ... × A_p + N_V with V = {x_1 = ... = x_p}. Bs and Ls are unused.
// Kuhn–Tucker: X = H ⊕ G_1 ⊕ ... ⊕ G_p, 𝓜 = (A × B_1⁻¹ × ... × B_p⁻¹) + skew coupling.
// Saddle: X = H ⊕ G ⊕ G (single B), 𝓜(x,y,v*) = (Ax + L*v*) × (By − v*) × {y − Lx}.
// Product-dual: X = H ⊕ G_1 ⊕ ... ⊕ G_p, 𝓜 = A × B_1 × ... × B_p + N_V, V = {(x, L_1x, ..., L_px)}.
// For Spingarn pass the A_i in As; otherwise As = {A}.
Embedding build_embedding(Embedding::Kind kind, const std::vector<OperatorSpec>& As,
                          const std::vector<OperatorSpec>& Bs = {}, const std::vector<LinOp>& Ls = {});

// ‖z − J_{T_0}(z − Σ_{j≥1} T_j z)‖ when every term but the first is single-valued.
double embedding_residual(const Embedding& E, const Vec& z);

// ---------------------------------------------------------------- basic drivers

// x_{n+1} = x_n + λ_n(J_{γ_nM}x_n − x_n); γ_n is capped at 1e6.
RunResult run_proximal_point(const OperatorSpec& M, const Schedule& gamma, const LoopConfig& cfg, const Vec& x0,
                             const std::optional<KernelResolvent>& kernel = std::nullopt);

// x_{n+1} = x_n − γ_nBx_n, B α-cocoercive, γ_n ∈ [ε, (2−ε)α].
RunResult run_euler(const OperatorSpec& B, const Schedule& gamma, const LoopConfig& cfg, const Vec& x0);

// Krasnosel'skiĭ–Mann on an α-averaged T: x_{n+1} = x_n + λ_n(Tx_n − x_n), λ_n from cfg.relaxation.
RunResult run_averaged_iteration(const OperatorSpec::Map& T, double alpha, const LoopConfig& cfg, const Vec& x0);

// x_{n+1} = x_n + λ_n P_V L*(J_{γB}(Lx_n) − Lx_n), 0 < ‖L‖ ≤ 1, x0 ∈ V.
RunResult run_resolvent_composition(const OperatorSpec& B, const LinOp& L, const Subspace& V, double gamma,
                                    const LoopConfig& cfg, const Vec& x0);

// Spingarn: find x ∈ V, x* ∈ V⊥ with x* ∈ Ax.
RunResult run_partial_inverse(const OperatorSpec& A, const Subspace& V, const LoopConfig& cfg, const Vec& x0,
                              const Vec& xs0);

// pd.x = J_{γB}y, pd.y_star = (y − J_{γB}y)/γ. The peaceman flag forces λ ≡ 2.
RunResult run_douglas_rachford(const OperatorSpec& A, const OperatorSpec& B, double gamma, const LoopConfig& cfg,
                               const Vec& y0, bool peaceman = false);

// C τ-cocoercive, γ ∈ (0, 2τ), λ_n ∈ (0, 2 − γ/(2τ)).
RunResult run_davis_yin(const OperatorSpec& A, const OperatorSpec& B, const OperatorSpec& C, double gamma,
                        const LoopConfig& cfg, const Vec& y0);

// B β-Lipschitz monotone, γ_n ∈ [ε, (1−ε)/β].
RunResult run_tseng_fbf(const OperatorSpec& A, const OperatorSpec& B, const Schedule& gamma, const LoopConfig& cfg,
                        const Vec& x0);

// B α-cocoercive, μ_n from cfg.relaxation. With a kernel the constant becomes αβ.
RunResult run_forward_backward(const OperatorSpec& A, const OperatorSpec& B, const Schedule& gamma,
                               const LoopConfig& cfg, const Vec& x0,
                               const std::optional<KernelResolvent>& kernel = std::nullopt);

// A + C + Q with C α-cocoercive and Q β-Lipschitz; either may be absent (empty spec).
RunResult run_fbhf(const OperatorSpec& A, const OperatorSpec& C, const OperatorSpec& Q, const Schedule& gamma,
                   const LoopConfig& cfg, const Vec& x0);

// ---------------------------------------------------------------- presets

// A on H, B_k on G_k, primal x solves 0 ∈ Ax + Σ L_k*B_k(L_k x).
RunResult run_partial_inverse_composite(const OperatorSpec& A, const std::vector<OperatorSpec>& Bs,
                                        const std::vector<LinOp>& Ls, const LoopConfig& cfg, const Vec& x0);

struct KernelProblem {
    OperatorSpec M;          // monotone part on the product space
    OperatorSpec C;          // cocoercive part (empty for PPA)
    KernelResolvent kernel;
};

// 0 ∈ Ax + L*B(Lx) with τσ‖L‖² < 1. State (x, y*).
KernelProblem chambolle_pock_problem(const OperatorSpec& A, const OperatorSpec& B, const LinOp& L, double tau,
                                     double sigma);
RunResult run_chambolle_pock(const OperatorSpec& A, const OperatorSpec& B, const LinOp& L, double tau, double sigma,
                             const LoopConfig& cfg, const Vec& x0, const Vec& ys0);

struct CondatVuTerm {
    OperatorSpec B;      // maximally monotone on G_k
    OperatorSpec Dinv;   // D_k⁻¹, β_k-cocoercive; empty when D_k = {0}⁻¹
    LinOp L;
    double sigma = 1.0;
};

// 0 ∈ Ax + Cx + Σ L_k*(B_k □ D_k)(L_k x). State (x, y*_1, ..., y*_p).
KernelProblem condat_vu_problem(const OperatorSpec& A, const OperatorSpec& C, const std::vector<CondatVuTerm>& terms,
                                double tau);
RunResult run_condat_vu(const OperatorSpec& A, const OperatorSpec& C, const std::vector<CondatVuTerm>& terms,
                        double tau, const LoopConfig& cfg, const Vec& x0, const Vec& ys0);

// FBF on (A × B⁻¹) + [[0, L*], [−L, 0]].
RunResult run_fbf_monotone_skew(const OperatorSpec& A, const OperatorSpec& B, const LinOp& L, const Schedule& gamma,
                                const LoopConfig& cfg, const Vec& x0, const Vec& ys0);

// min f(x) + g(y) s.t. Lx = y; state (x, y, v*).
RunResult run_fbf_lagrangian(const OperatorSpec& df, const OperatorSpec& dg, const LinOp& L, const Schedule& gamma,
                             const LoopConfig& cfg, const Vec& x0, const Vec& y0, const Vec& vs0);

struct ParallelSumTerm {
    OperatorSpec B;      // maximally monotone on G_k
    OperatorSpec Dinv;   // D_k⁻¹, ν_k-Lipschitz monotone; empty when D_k = {0}⁻¹
    LinOp L;
};

// 0 ∈ Ax + Qx + Σ L_k*(B_k □ D_k)(L_k x), Q μ-Lipschitz (may be empty).
RunResult run_fbf_parallel_sum(const OperatorSpec& A, const OperatorSpec& Q, const std::vector<ParallelSumTerm>& terms,
                               const Schedule& gamma, const LoopConfig& cfg, const Vec& x0, const Vec& ys0);

// min ι_C(x) + ½‖Lx − y‖²; γ_n ∈ [ε, (2−ε)/‖L‖²].
RunResult run_projected_landweber(const OperatorSpec& projC, const LinOp& L, const Vec& y, const Schedule& gamma,
                                  const LoopConfig& cfg, const Vec& x0);

struct YosidaTerm {
    OperatorSpec B;
    LinOp L;
    double rho = 1.0;
    double omega = 1.0;
};

// 0 ∈ Ax + Σ ω_k L_k*(^{ρ_k}B_k)(L_k x).
RunResult run_partial_yosida(const OperatorSpec& A, const std::vector<YosidaTerm>& terms, const Schedule& gamma,
                             const LoopConfig& cfg, const Vec& x0);

// 0 ∈ Ax + (^ρB)x.
RunResult run_backward_backward(const OperatorSpec& A, const OperatorSpec& B, double rho, const Schedule& gamma,
                                const LoopConfig& cfg, const Vec& x0);

struct DualFBTerm {
    OperatorSpec B;      // B_k on G_k
    OperatorSpec Dinv;   // D_k⁻¹, ν_k-cocoercive; empty when D_k = {0}⁻¹
    LinOp L;
};

// z ∈ Ax + ρx + Σ L_k*(B_k □ D_k)(L_k x); FB on the dual, x_n = J_{A/ρ}((z − ΣL_k*y*_k)/ρ).
RunResult run_dual_fb(const OperatorSpec& A, double rho, const Vec& z, const std::vector<DualFBTerm>& terms,
                      const Schedule& gamma, const LoopConfig& cfg, const Vec& ys0);

// J_{ΣA_k}z via the barycentric Dykstra recursion (dual FB with γ = 1/p, μ = 1).
RunResult run_barycentric_dykstra(const std::vector<OperatorSpec>& As, const Vec& z, const LoopConfig& cfg);

// min f(x) + g(y) + h(x) s.t. Lx = y, ∇h α-cocoercive; FBHF on (x, y, v*).
RunResult run_fbhf_saddle(const OperatorSpec& df, const OperatorSpec& dg, const OperatorSpec& gradh, const LinOp& L,
                          const Schedule& gamma, const LoopConfig& cfg, const Vec& x0, const Vec& y0, const Vec& vs0);

double spectral_norm(const LinOp& L);

}  // namespace splitkit
