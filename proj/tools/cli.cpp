#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace splitkit::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Vec zeros(Index n) { return Vec::Zero(n); }

Outcome wrap(RunResult r, bool comparable = true, bool same_problem = true) {
    Outcome o;
    o.candidate = r.pd;
    o.result = std::move(r);
    o.oracle_comparable = comparable && same_problem;
    o.solves_problem = same_problem;
    return o;
}

// The oracle point is the unique solution, or the minimal-norm zero that strong mode from
// x0 = 0 reaches.
bool affine_unique(const ProblemInstance& p) {
    Eigen::FullPivLU<Mat> lu(p.mat("S"));
    return lu.isInvertible();
}

double lambda_max_sym(const Mat& S) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));
    return es.eigenvalues().maxCoeff();
}

BlockSchedule block_schedule(const Settings& s, int m, int pk) {
    if (s.has("schedule")) {
        BlockSchedule b = read_block_schedule_file(s.str("schedule"));
        if (b.m != m || b.p != pk)
            throw ParameterError("schedule file is for m = " + std::to_string(b.m) + ", p = " + std::to_string(b.p) +
                                 " but the problem has m = " + std::to_string(m) + ", p = " + std::to_string(pk));
        require_valid_schedule(b);
        return b;
    }
    BlockScheduleKind kind = parse_block_schedule_kind(s.str("schedule_kind", "full"));
    BlockSchedule b = make_block_schedule(kind, m, pk, s.integer("R", 1), s.integer("T", 0),
                                          static_cast<std::uint64_t>(s.integer("seed", 0)), s.integer("horizon", 20000));
    require_valid_schedule(b);
    return b;
}

std::vector<AlgoEntry> build_registry() {
    std::vector<AlgoEntry> R;

    R.push_back({"ppa", "proximal point on M", {"affine_zero"}, [](const ProblemInstance& p, const Settings& s) {
                     OperatorSpec M = two_operator_view(p).A;
                     LoopConfig cfg = loop_config(s);
                     return wrap(run_proximal_point(M, s.schedule("gamma", "1"), cfg, zeros(M.dim())),
                                 affine_unique(p) || cfg.mode == EngineMode::Haugazeau);
                 }});

    R.push_back({"km", "Krasnosel'skii-Mann on T = J_{γM} (1/2-averaged)", {"affine_zero", "two_lines"},
                 [](const ProblemInstance& p, const Settings& s) {
                     LoopConfig cfg = loop_config(s);
                     if (p.kind == "two_lines") {
                         TwoOperatorView v = two_operator_view(p);
                         // P_A ∘ P_B is 2/3-averaged
                         auto T = [v](const Vec& x) { return v.A.resolvent(1.0, v.B.resolvent(1.0, x)); };
                         return wrap(run_averaged_iteration(T, 2.0 / 3.0, cfg, zeros(2)));
                     }
                     OperatorSpec M = two_operator_view(p).A;
                     double g = s.number("gamma", 1.0);
                     auto T = [M, g](const Vec& x) { return M.resolvent(g, x); };
                     return wrap(run_averaged_iteration(T, 0.5, cfg, zeros(M.dim())), affine_unique(p));
                 }});

    R.push_back({"euler", "explicit step x - γBx on a cocoercive affine B (affine_zero with skew=0)", {"affine_zero"},
                 [](const ProblemInstance& p, const Settings& s) {
                     const Mat& S = p.mat("S");
                     if ((S - S.transpose()).norm() > 1e-12 * (1.0 + S.norm()))
                         throw ParameterError("euler needs a cocoercive operator: generate affine_zero with skew=0");
                     double a = 1.0 / lambda_max_sym(S);
                     OperatorSpec B = OperatorSpec::affine(S, p.vec("b")).with_cocoercivity(a);
                     LoopConfig cfg = loop_config(s);
                     return wrap(run_euler(B, s.schedule("gamma", fmt(a)), cfg, zeros(S.rows())), affine_unique(p));
                 },
                 "affine_zero:skew=0"});

    R.push_back({"resolvent_composition", "relaxed P_V L*(J_{γB}L - L) iteration; finds x with Lx ∈ D",
                 {"split_feasibility"}, [](const ProblemInstance& p, const Settings& s) {
                     const Mat& L = p.mat("L");
                     double nl = spectral_norm(LinOp(L));
                     OperatorSpec B = OperatorSpec::prox(ProxAtom::box(p.vec("dlo") / nl, p.vec("dhi") / nl));
                     Outcome o = wrap(run_resolvent_composition(B, LinOp(Mat(L / nl)), Subspace::whole(L.cols()),
                                                                s.number("gamma", 1.0), loop_config(s), zeros(L.cols())),
                                      false, false);
                     return o;
                 }});

    R.push_back({"partial_inverse", "Spingarn partial inverse on the product of intervals with the diagonal",
                 {"consensus"}, [](const ProblemInstance& p, const Settings& s) {
                     const int m = p.iparam("m");
                     const Index n = p.iparam("n");
                     std::vector<OperatorSpec> fs;
                     for (int i = 0; i < m; ++i)
                         fs.push_back(OperatorSpec::prox(ProxAtom::box(p.vec("lo" + std::to_string(i + 1)),
                                                                       p.vec("hi" + std::to_string(i + 1)))));
                     Mat basis(m * n, n);
                     for (int i = 0; i < m; ++i) basis.middleRows(i * n, n) = Mat::Identity(n, n);
                     return wrap(run_partial_inverse(OperatorSpec::product(fs), Subspace::span(basis), loop_config(s),
                                                     zeros(m * n), zeros(m * n)),
                                 false);
                 }});

    R.push_back({"partial_inverse_composite", "partial inverse on the graph of (L_k) in the product space",
                 {"composite"}, [](const ProblemInstance& p, const Settings& s) {
                     KTProblem K = kt_view(p);
                     if (K.m() != 1) throw ParameterError("partial_inverse_composite needs m = 1");
                     std::vector<LinOp> Ls;
                     for (int k = 0; k < K.p(); ++k) Ls.push_back(K.L[k][0]);
                     return wrap(run_partial_inverse_composite(K.A[0], K.B, Ls, loop_config(s), zeros(K.A[0].dim())));
                 }});

    auto dr = [](bool peaceman) {
        return [peaceman](const ProblemInstance& p, const Settings& s) {
            TwoOperatorView v = two_operator_view(p);
            return wrap(run_douglas_rachford(v.A, v.B, s.number("gamma", 1.0), loop_config(s), zeros(v.A.dim()),
                                             peaceman));
        };
    };
    R.push_back({"douglas_rachford", "Douglas-Rachford, pd.x = J_{γB}y", {"two_lines", "lasso"}, dr(false)});
    R.push_back({"peaceman_rachford", "Peaceman-Rachford (λ ≡ 2, no general convergence guarantee)",
                 {"two_lines", "lasso"}, dr(true)});

    R.push_back({"davis_yin", "three-operator splitting A + B + C, C cocoercive", {"interval_1d", "lasso"},
                 [](const ProblemInstance& p, const Settings& s) {
                     TwoOperatorView v = two_operator_view(p);
                     if (p.kind == "lasso") {
                         v.C = v.B;
                         v.B = OperatorSpec::zero(v.A.dim());
                     }
                     return wrap(run_davis_yin(v.A, v.B, v.C, s.number("gamma", 1.0), loop_config(s), zeros(v.A.dim())));
                 }});

    R.push_back({"tseng_fbf", "Tseng forward-backward-forward, B Lipschitz monotone", {"lasso", "affine_zero"},
                 [](const ProblemInstance& p, const Settings& s) {
                     TwoOperatorView v = two_operator_view(p);
                     OperatorSpec A, B;
                     double beta;
                     if (p.kind == "lasso") {
                         A = v.A;
                         beta = 1.0 / *v.B.cocoercivity();
                         B = v.B.with_lipschitz(beta);
                     } else {
                         beta = spectral_norm(LinOp(p.mat("S")));
                         A = OperatorSpec::zero(p.mat("S").rows());
                         B = v.A.with_lipschitz(beta);
                     }
                     LoopConfig cfg = loop_config(s);
                     bool cmp = p.kind == "lasso" || affine_unique(p) || cfg.mode == EngineMode::Haugazeau;
                     return wrap(run_tseng_fbf(A, B, s.schedule("gamma", fmt(0.5 / beta)), cfg, zeros(A.dim())), cmp);
                 }});

    R.push_back({"fb", "forward-backward, B cocoercive", {"lasso", "interval_1d"},
                 [](const ProblemInstance& p, const Settings& s) {
                     TwoOperatorView v = two_operator_view(p);
                     OperatorSpec A = v.A, B = v.B;
                     if (p.kind == "interval_1d") {
                         double hi = std::min(p.param("hi"), p.param("u"));
                         A = OperatorSpec::prox(ProxAtom::box(Vec::Constant(1, p.param("lo")), Vec::Constant(1, hi)));
                         B = v.C;
                     }
                     return wrap(run_forward_backward(A, B, s.schedule("gamma", "1"), loop_config(s), zeros(A.dim())));
                 }});

    R.push_back({"fbhf", "forward-backward-half-forward A + C + Q", {"lasso", "bilinear_minimax"},
                 [](const ProblemInstance& p, const Settings& s) {
                     if (p.kind == "lasso") {
                         TwoOperatorView v = two_operator_view(p);
                         return wrap(run_fbhf(v.A, v.B, OperatorSpec(), s.schedule("gamma", "1"), loop_config(s),
                                              zeros(v.A.dim())));
                     }
                     SaddleProblem S = saddle_view(p);
                     OperatorSpec A = OperatorSpec::product({S.primal[0].A, S.primal[1].A});
                     double chi = *S.R.lipschitz();
                     return wrap(run_fbhf(A, OperatorSpec(), S.R, s.schedule("gamma", fmt(0.5 / chi)), loop_config(s),
                                          zeros(A.dim())));
                 }});

    R.push_back({"chambolle_pock", "renormed proximal point with the primal-dual kernel", {"composite"},
                 [](const ProblemInstance& p, const Settings& s) {
                     TwoOperatorView v = two_operator_view(p);
                     double nl = spectral_norm(v.L);
                     double t = s.number("tau", 0.9 / nl), sg = s.number("sigma", 0.9 / nl);
                     return wrap(run_chambolle_pock(v.A, v.B, v.L, t, sg, loop_config(s), zeros(v.L.cols()),
                                                    zeros(v.L.rows())));
                 }});

    R.push_back({"condat_vu", "renormed forward-backward with the primal-dual kernel", {"composite"},
                 [](const ProblemInstance& p, const Settings& s) {
                     KTProblem K = kt_view(p);
                     if (K.m() != 1) throw ParameterError("condat_vu needs m = 1");
                     double l2 = 0.0;
                     for (int k = 0; k < K.p(); ++k) l2 += std::pow(spectral_norm(K.L[k][0]), 2);
                     double t = s.number("tau", 0.9 / std::sqrt(l2));
                     std::vector<CondatVuTerm> terms;
                     Index total = 0;
                     for (int k = 0; k < K.p(); ++k) {
                         terms.push_back({K.B[k], OperatorSpec(), K.L[k][0], s.number("sigma", 0.9 / std::sqrt(l2))});
                         total += K.B[k].dim();
                     }
                     return wrap(run_condat_vu(K.A[0], OperatorSpec(), terms, t, loop_config(s), zeros(K.A[0].dim()),
                                               zeros(total)));
                 }});

    R.push_back({"fbf_monotone_skew", "FBF on (A × B⁻¹) + skew coupling", {"composite"},
                 [](const ProblemInstance& p, const Settings& s) {
                     TwoOperatorView v = two_operator_view(p);
                     double nl = estimate_operator_norm(v.L);
                     return wrap(run_fbf_monotone_skew(v.A, v.B, v.L, s.schedule("gamma", fmt(0.5 / nl)), loop_config(s),
                                                       zeros(v.L.cols()), zeros(v.L.rows())));
                 }});

    R.push_back({"fbf_lagrangian", "FBF on the Lagrangian of min f(x) + g(y) s.t. Lx = y", {"composite"},
                 [](const ProblemInstance& p, const Settings& s) {
                     TwoOperatorView v = two_operator_view(p);
                     const Index n = v.L.cols(), m = v.L.rows();
                     double nl = estimate_operator_norm(v.L);
                     return wrap(run_fbf_lagrangian(v.A, v.B, v.L, s.schedule("gamma", fmt(0.5 / std::sqrt(1 + nl * nl))),
                                                    loop_config(s), zeros(n), zeros(m), zeros(m)));
                 }});

    R.push_back({"fbf_parallel_sum", "FBF for 0 ∈ Ax + L*((B □ D)(Lx))", {"parallel_sum"},
                 [](const ProblemInstance& p, const Settings& s) {
                     const Mat& L = p.mat("L");
                     const Index n = L.cols(), g = L.rows();
                     const double delta = p.param("delta");
                     OperatorSpec A = OperatorSpec::affine(p.mat("P"), -p.vec("p"));
                     ParallelSumTerm t{OperatorSpec::prox(ProxAtom::box(p.vec("c"), p.vec("c"))),
                                       OperatorSpec::affine(Mat(Mat::Identity(g, g) / delta)).with_lipschitz(1.0 / delta),
                                       LinOp(L)};
                     double beta = 1.0 / delta + estimate_operator_norm(LinOp(L));
                     return wrap(run_fbf_parallel_sum(A, OperatorSpec(), {t}, s.schedule("gamma", fmt(0.5 / beta)),
                                                      loop_config(s), zeros(n), zeros(g)));
                 }});

    R.push_back({"projected_landweber", "FB on ι_C + ½‖L· − y‖²; reports the projection A·c", {"minkowski"},
                 [](const ProblemInstance& p, const Settings& s) {
                     const int pk = p.iparam("p");
                     const Index n = p.iparam("n"), g = p.iparam("g");
                     Mat A(g, pk * n);
                     Vec lo(pk * n), hi(pk * n);
                     for (int k = 0; k < pk; ++k) {
                         std::string t = std::to_string(k + 1);
                         A.middleCols(k * n, n) = p.mat("L" + t);
                         lo.segment(k * n, n) = p.vec("lo" + t);
                         hi.segment(k * n, n) = p.vec("hi" + t);
                     }
                     double nl = spectral_norm(LinOp(A));
                     RunResult r = run_projected_landweber(OperatorSpec::prox(ProxAtom::box(lo, hi)), LinOp(A), p.vec("y"),
                                                           s.schedule("gamma", fmt(1.0 / (nl * nl))), loop_config(s),
                                                           zeros(pk * n));
                     Outcome o = wrap(r);
                     o.candidate.y_star = r.pd.x;
                     o.candidate.x = A * r.pd.x;
                     return o;
                 }});

    R.push_back({"partial_yosida", "FB on A + L*(^ρB)(L·), an approximation of the composite problem", {"composite"},
                 [](const ProblemInstance& p, const Settings& s) {
                     TwoOperatorView v = two_operator_view(p);
                     YosidaTerm t{v.B, v.L, s.number("rho", 0.1), s.number("omega", 1.0)};
                     double nl = spectral_norm(v.L);
                     double a = t.rho / (t.omega * nl * nl);
                     return wrap(run_partial_yosida(v.A, {t}, s.schedule("gamma", fmt(a)), loop_config(s),
                                                    zeros(v.L.cols())),
                                 false, false);
                 }});

    R.push_back({"backward_backward", "FB on A + ^ρB", {"two_lines"}, [](const ProblemInstance& p, const Settings& s) {
                     TwoOperatorView v = two_operator_view(p);
                     double rho = s.number("rho", 1.0);
                     return wrap(run_backward_backward(v.A, v.B, rho, s.schedule("gamma", fmt(rho)), loop_config(s),
                                                       zeros(2)));
                 }});

    R.push_back({"dual_fb", "forward-backward on the dual of a strongly monotone inclusion", {"dual_strong"},
                 [](const ProblemInstance& p, const Settings& s) {
                     const Mat& L = p.mat("L");
                     OperatorSpec A = OperatorSpec::affine(p.mat("S_A"), p.vec("a"));
                     OperatorSpec B = OperatorSpec::affine(p.mat("S_B"), p.vec("b"));
                     const double rho = p.param("rho");
                     double nl = spectral_norm(LinOp(L));
                     double a = rho / (nl * nl);
                     return wrap(run_dual_fb(A, rho, p.vec("z"), {DualFBTerm{B, OperatorSpec(), LinOp(L)}},
                                             s.schedule("gamma", fmt(a)), loop_config(s), zeros(L.rows())));
                 }});

    R.push_back({"barycentric_dykstra", "projection onto an intersection of half-spaces", {"halfspaces"},
                 [](const ProblemInstance& p, const Settings& s) {
                     return wrap(run_barycentric_dykstra(halfspace_view(p), p.vec("z"), loop_config(s)));
                 }});

    R.push_back({"fbhf_saddle", "FBHF on (x, y, v*) for min h(x) + g(y) s.t. Lx = y", {"composite"},
                 [](const ProblemInstance& p, const Settings& s) {
                     TwoOperatorView v = two_operator_view(p);
                     const Index n = v.L.cols(), m = v.L.rows();
                     const Mat& P = p.mat("P1");
                     OperatorSpec gh = OperatorSpec::affine(P, -p.vec("p1")).with_cocoercivity(1.0 / lambda_max_sym(P));
                     double nl = estimate_operator_norm(v.L);
                     double chi = std::min(2.0 * *gh.cocoercivity(), 1.0 / std::sqrt(1 + nl * nl));
                     return wrap(run_fbhf_saddle(OperatorSpec::zero(n), v.B, gh, v.L, s.schedule("gamma", fmt(0.5 * chi)),
                                                 loop_config(s), zeros(n), zeros(m), zeros(m)));
                 }});

    R.push_back({"kt_projective", "two-operator Kuhn-Tucker projective splitting", {"composite"},
                 [](const ProblemInstance& p, const Settings& s) {
                     TwoOperatorView v = two_operator_view(p);
                     return wrap(run_kt_projective(v.A, v.B, v.L, s.schedule("gamma", "1"), s.schedule("sigma", "1"),
                                                   loop_config(s), zeros(v.L.cols()), zeros(v.L.rows())));
                 }});

    R.push_back({"block_kt_projective", "asynchronous block-iterative Kuhn-Tucker projective splitting",
                 {"composite", "consensus", "split_feasibility"}, [](const ProblemInstance& p, const Settings& s) {
                     KTProblem K = kt_view(p);
                     BlockSchedule sched = block_schedule(s, K.m(), K.p());
                     KTParams par;
                     par.gamma.assign(K.m(), s.schedule("gamma", "1"));
                     par.sigma.assign(K.p(), s.schedule("sigma", "1"));
                     Outcome o = wrap(run_block_kt_projective(K, sched, par, loop_config(s),
                                                              zeros(K.primal_layout().total_dim()),
                                                              zeros(K.dual_layout().total_dim())),
                                      p.kind != "consensus");
                     if (p.kind == "split_feasibility") o.candidate.y_star = Vec();
                     return o;
                 }});

    R.push_back({"saddle_projective", "asynchronous saddle projective splitting",
                 {"bilinear_minimax", "parallel_sum", "composite"}, [](const ProblemInstance& p, const Settings& s) {
                     SaddleProblem S = saddle_view(p);
                     BlockSchedule sched = block_schedule(s, S.m(), S.p());
                     std::optional<double> alpha;
                     for (const auto& d : S.dual)
                         for (const OperatorSpec* f : {&d.Bc, &d.Dc})
                             if (!f->empty() && f->cocoercivity())
                                 alpha = alpha ? std::min(*alpha, *f->cocoercivity()) : *f->cocoercivity();
                     for (const auto& b : S.primal)
                         if (!b.C.empty() && b.C.cocoercivity())
                             alpha = alpha ? std::min(*alpha, *b.C.cocoercivity()) : *b.C.cocoercivity();
                     SaddleParams par;
                     par.sigma = s.number("sigma", alpha ? 0.5 / *alpha : 1.0);
                     double chi = S.R.empty() ? 0.0 : S.R.lipschitz().value_or(0.0);
                     par.gamma.assign(S.m(), s.schedule("gamma", fmt(0.9 / (chi + par.sigma))));
                     par.mu.assign(S.p(), s.schedule("mu_k", fmt(0.9 / par.sigma)));
                     par.rho.assign(S.p(), s.schedule("rho_k", fmt(0.9 / par.sigma)));
                     par.sigma_k.assign(S.p(), s.schedule("sigma_k", "1"));
                     const Index nx = S.primal_layout().total_dim(), ny = S.dual_layout().total_dim();
                     RunResult r = run_saddle_projective(S, sched, par, loop_config(s), zeros(nx), zeros(ny), zeros(ny),
                                                         zeros(ny));
                     Outcome o = wrap(r);
                     if (p.kind == "bilinear_minimax") o.candidate.y_star = Vec();
                     return o;
                 }});

    return R;
}

std::string summary_number(double v) { return std::isfinite(v) ? fmt(v) : (std::isnan(v) ? "nan" : "inf"); }

int cmd_run(Settings& s, std::ostream& out) {
    if (!s.has("algo")) throw ParameterError("run: missing algo");
    const AlgoEntry& e = find_algorithm(s.str("algo"));
    std::string problem = s.str("problem", e.default_problem.empty() ? e.kinds.front() : e.default_problem);
    ProblemInstance p = load_problem(problem, static_cast<std::uint64_t>(s.integer("seed", 0)));
    if (std::find(e.kinds.begin(), e.kinds.end(), p.kind) == e.kinds.end()) {
        std::string list;
        for (const auto& k : e.kinds) list += (list.empty() ? "" : ", ") + k;
        throw ParameterError("algorithm " + e.name + " does not accept problem kind " + p.kind + " (accepted: " + list +
                             ")");
    }
    Outcome o = e.run(p, s);
    if (s.has("trace")) trace_write(o.result.trace, s.str("trace"));

    double kind_res = std::numeric_limits<double>::quiet_NaN();
    double dist = std::numeric_limits<double>::quiet_NaN();
    if (o.solves_problem) kind_res = residual_eval(p, o.candidate);
    if (o.oracle_comparable) {
        OracleSolution sol = oracle_solve(p);
        if (sol.primal.size() == o.candidate.x.size()) dist = (o.candidate.x - sol.primal).norm();
    }
    const RunTrace& t = o.result.trace;
    out << "algorithm=" << e.name << "\n";
    out << "problem=" << p.kind << "\n";
    out << "status=" << to_string(t.status) << "\n";
    out << "iterations=" << t.iterations << "\n";
    out << "final_residual=" << summary_number(t.final_residual()) << "\n";
    out << "problem_residual=" << summary_number(kind_res) << "\n";
    out << "dist_to_oracle=" << summary_number(dist) << "\n";
    if (!t.message.empty()) out << "message=" << t.message << "\n";
    return t.status == RunStatus::Converged ? 0 : 2;
}

}  // namespace

// ---------------------------------------------------------------- settings

const std::vector<std::string>& Settings::known_keys() {
    static const std::vector<std::string> k = {
        "problem", "algo",    "mode",    "max_iter", "tol",   "eps",     "seed",      "trace",
        "gamma",   "sigma",   "tau",     "mu",       "relax", "lambda",  "rho",       "omega",
        "mu_k",    "rho_k",   "sigma_k", "schedule", "schedule_kind",    "R",         "T",
        "horizon", "stall_limit",        "inertia",  "timing"};
    return k;
}

void Settings::set(const std::string& key, const std::string& value) {
    const auto& k = known_keys();
    if (std::find(k.begin(), k.end(), key) == k.end()) throw ParameterError("unknown config key '" + key + "'");
    values_[key] = value;
}

std::string Settings::str(const std::string& key, const std::string& def) const {
    auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
}

double Settings::number(const std::string& key, double def) const {
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    const char* s = it->second.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0') throw ParameterError("config key " + key + ": not a number: '" + it->second + "'");
    return v;
}

int Settings::integer(const std::string& key, int def) const {
    double v = number(key, def);
    if (v != std::floor(v) || std::abs(v) > 2e9) throw ParameterError("config key " + key + ": not an integer");
    return static_cast<int>(v);
}

Schedule Settings::schedule(const std::string& key, const std::string& def) const {
    try {
        return Schedule::parse(str(key, def));
    } catch (const ParameterError& e) {
        throw ParameterError("config key " + key + ": " + e.what());
    }
}

void read_config(std::istream& is, Settings& s) {
    std::string line;
    int no = 0;
    while (std::getline(is, line)) {
        ++no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(no) + ": expected key=value");
        s.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void read_config_file(const std::string& path, Settings& s) {
    std::ifstream f(path);
    if (!f) throw ParameterError("cannot open config file '" + path + "'");
    read_config(f, s);
}

LoopConfig loop_config(const Settings& s) {
    LoopConfig c;
    c.mode = parse_mode(s.str("mode", "fejer"));
    for (const char* k : {"relax", "mu", "lambda"})
        if (s.has(k)) c.relaxation = s.schedule(k, "1");
    c.epsilon = s.number("eps", 1e-3);
    c.max_iter = s.integer("max_iter", 10000);
    c.tol = s.number("tol", 1e-8);
    c.stall_limit = s.integer("stall_limit", 3);
    if (s.has("inertia")) c.inertia = s.schedule("inertia", "0");
    c.seed = static_cast<std::uint64_t>(s.integer("seed", 0));
    c.timing = s.integer("timing", 0) != 0;
    return c;
}

const std::vector<AlgoEntry>& registry() {
    static const std::vector<AlgoEntry> r = build_registry();
    return r;
}

const AlgoEntry& find_algorithm(const std::string& name) {
    for (const auto& e : registry())
        if (e.name == name) return e;
    throw ParameterError("unknown algorithm '" + name + "' (see list-algorithms)");
}

ProblemInstance load_problem(const std::string& text, std::uint64_t default_seed) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(text, ec)) return read_problem_file(text);
    std::string spec = text;
    if (spec.find("seed=") == std::string::npos)
        spec += (spec.find(':') == std::string::npos ? ":" : ",") + std::string("seed=") + std::to_string(default_seed);
    return parse_problem_spec(spec);
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"splitkit: monotone operator splitting toolkit"};
    app.require_subcommand(1);

    Settings s;
    std::string config;
    std::vector<std::string> sets;
    std::map<std::string, std::string> direct;

    auto* run = app.add_subcommand("run", "run an algorithm on a problem");
    run->add_option("--config", config, "key=value config file");
    for (const char* k : {"problem", "algo", "mode", "max_iter", "tol", "eps", "seed", "trace", "gamma", "sigma", "tau",
                          "mu", "relax", "rho", "schedule", "schedule_kind", "R", "T", "inertia"}) {
        std::string flag = std::string("--") + k;
        std::replace(flag.begin() + 2, flag.end(), '_', '-');
        run->add_option_function<std::string>(flag, [&direct, k](const std::string& v) { direct[k] = v; },
                                              std::string("sets ") + k);
    }
    run->add_option("--set", sets, "extra key=value settings");

    std::string sched_file, sched_kind = "round_robin";
    int sm = 1, sp = 1, sR = 1, sT = 0;
    std::uint64_t sseed = 0;
    bool write = false;
    auto* vs = app.add_subcommand("validate-schedule", "check a block schedule against the control assumptions");
    vs->add_option("file", sched_file, "schedule file");
    vs->add_option("--kind", sched_kind, "generate instead: full | round_robin | random_with_cover");
    vs->add_option("--m", sm);
    vs->add_option("--p", sp);
    vs->add_option("--R", sR);
    vs->add_option("--T", sT);
    vs->add_option("--seed", sseed);
    vs->add_flag("--write", write, "print the generated schedule");

    auto* la = app.add_subcommand("list-algorithms", "list algorithm names and accepted problem kinds");

    std::string oproblem, odump;
    auto* orc = app.add_subcommand("oracle", "solve a problem with its brute-force oracle");
    orc->add_option("--problem", oproblem, "inline spec or problem file")->required();
    orc->add_option("--dump", odump, "write the instance to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*la) {
            for (const auto& e : registry()) {
                out << e.name << "\t";
                for (std::size_t i = 0; i < e.kinds.size(); ++i) out << (i ? "," : "") << e.kinds[i];
                out << "\t" << e.summary << "\n";
            }
            return 0;
        }
        if (*vs) {
            BlockSchedule b = sched_file.empty()
                                  ? make_block_schedule(parse_block_schedule_kind(sched_kind), sm, sp, sR, sT, sseed, 64)
                                  : read_block_schedule_file(sched_file);
            auto issues = validate_block_schedule(b);
            if (write) write_block_schedule(b, out);
            if (issues.empty()) {
                out << "valid\n";
                return 0;
            }
            for (const auto& i : issues) err << "violation: " << i << "\n";
            return 1;
        }
        if (*orc) {
            const char* env = std::getenv("SPLITKIT_SEED");
            ProblemInstance p = load_problem(oproblem, env ? std::stoull(env) : 0);
            if (!odump.empty()) {
                std::ofstream f(odump);
                if (!f) throw ParameterError("cannot write '" + odump + "'");
                write_problem(p, f);
            }
            OracleSolution sol = oracle_solve(p);
            out << "problem=" << p.kind << "\n";
            out << "method=" << sol.method << "\n";
            out << "primal=";
            for (Index i = 0; i < sol.primal.size(); ++i) out << (i ? "," : "") << fmt(sol.primal(i));
            out << "\n";
            if (sol.dual.size()) {
                out << "dual=";
                for (Index i = 0; i < sol.dual.size(); ++i) out << (i ? "," : "") << fmt(sol.dual(i));
                out << "\n";
            }
            out << "certificate=" << summary_number(sol.certificate) << "\n";
            return 0;
        }
        if (!config.empty()) read_config_file(config, s);
        for (const auto& kv : sets) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + kv + "'");
            s.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
        }
        for (const auto& [k, v] : direct) s.set(k, v);
        if (const char* env = std::getenv("SPLITKIT_SEED")) s.set("seed", env);
        return cmd_run(s, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace splitkit::cli
