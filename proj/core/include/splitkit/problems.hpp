#pragma once

#include "splitkit/projective.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace splitkit {

// Seeded test instance. Matrices and vectors are keyed by name; see gen_problem for the
// contents of each kind.
struct ProblemInstance {
    std::string kind;
    std::uint64_t seed = 0;
    std::map<std::string, double> params;
    std::map<std::string, Mat> mats;
    std::map<std::string, Vec> vecs;

    double param(const std::string& k) const;
    int iparam(const std::string& k) const { return static_cast<int>(param(k)); }
    const Mat& mat(const std::string& k) const;
    const Vec& vec(const std::string& k) const;
};

struct OracleSolution {
    Vec primal;
    Vec dual;                 // empty when the kind has no dual variable
    double certificate = 0.0; // residual_eval of (primal, dual)
    std::string method;
};

// Kinds:
//   affine_zero        x ↦ Sx + b, S = K−K*+G*G+νI on a rank-r subspace, planted zero
//   two_lines          two lines in R² meeting at a planted point
//   halfspaces         projection of z onto ∩{⟨g_j,x⟩ ≤ h_j}
//   split_feasibility  minimal-norm x ∈ [lo,hi] with Lx ∈ [dlo,dhi]
//   lasso              min λ‖x‖₁ + ½‖Lx − y‖², ‖L‖ = 1, planted support {1,3}
//   composite          0 ∈ P_ix_i − p_i + Σ_k L_ki*(Q_k(Σ_j L_kj x_j) − q_k), planted (x̄, ȳ*)
//   dual_strong        z ∈ (S_A + ρ)x + a + L*(S_B Lx + b)
//   minkowski          projection of y onto Σ_k L_k(C_k), C_k boxes
//   consensus          common point of m intervals
//   bilinear_minimax   min_u max_v ½a_f‖u‖² − ⟨c_f,u⟩ + ½⟨Pu,u⟩ + ⟨Mv,u⟩ − ½⟨Nv,v⟩ − ½a_g‖v‖² + ⟨c_g,v⟩
//   parallel_sum       0 ∈ Px − p + L*((N_{c} □ δId)(Lx))
//   interval_1d        0 ∈ N_[lo,hi]x + N_(−∞,u]x + (x − c)
std::vector<std::string> problem_kinds();

ProblemInstance gen_problem(const std::string& kind, const std::map<std::string, double>& params = {},
                            std::uint64_t seed = 0);
// "lasso:n=6,seed=1"
ProblemInstance parse_problem_spec(const std::string& spec);

OracleSolution oracle_solve(const ProblemInstance& p);
double residual_eval(const ProblemInstance& p, const PrimalDualPair& candidate);

void write_problem(const ProblemInstance& p, std::ostream& os);
ProblemInstance read_problem(std::istream& is);
ProblemInstance read_problem_file(const std::string& path);

// ---------------------------------------------------------------- oracle primitives (no engine code)

// argmin ½‖x − z‖² s.t. Gx ≤ h by enumerating active sets (at most 12 rows).
Vec polyhedral_projection(const Mat& G, const Vec& h, const Vec& z);
// argmin ‖Ac − y‖² over lo ≤ c ≤ hi by enumerating bound patterns (at most 8 unknowns).
Vec box_least_squares(const Mat& A, const Vec& y, const Vec& lo, const Vec& hi);
// argmin λ‖x‖₁ + ½‖Lx − y‖² by enumerating sign patterns (at most 10 unknowns).
Vec lasso_sign_enumeration(const Mat& L, const Vec& y, double lambda);
// Root of a nondecreasing f on [lo,hi]; returns an endpoint when f has constant sign.
double bisect_monotone(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-15);
// Projection of x0 onto {x : Mx + c = 0}.
Vec affine_projection(const Mat& M, const Vec& c, const Vec& x0);
// Residual of 0 ∈ x − z + N_{Gx≤h}(x): infeasibility plus the distance from z − x to the active cone.
double polyhedral_kkt_residual(const Mat& G, const Vec& h, const Vec& z, const Vec& x);

// ---------------------------------------------------------------- operator views

struct TwoOperatorView {
    OperatorSpec A, B, C;  // C empty when absent
    LinOp L;               // default when absent
};

// lasso: A = ∂(λ‖·‖₁), B = ∇½‖L·−y‖² (α = 1/‖L‖²).
// two_lines: A, B normal cones of the lines.
// interval_1d: A = N_[lo,hi], B = N_(−∞,u], C = Id − c.
// affine_zero: A = x ↦ Sx + b.
// composite (m = p = 1): A = P·−p, B = Q·−q, L.
TwoOperatorView two_operator_view(const ProblemInstance& p);

// composite and consensus.
KTProblem kt_view(const ProblemInstance& p);
// parallel_sum, bilinear_minimax, composite.
SaddleProblem saddle_view(const ProblemInstance& p);
// halfspaces: one projector per constraint.
std::vector<OperatorSpec> halfspace_view(const ProblemInstance& p);

}  // namespace splitkit
