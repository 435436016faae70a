#pragma once

#include "splitkit/schedule.hpp"
#include "splitkit/space.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitkit {

struct EmptyIntersectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// {z : ⟨z, u*⟩ ≤ η}
struct HalfSpace {
    Vec u_star;
    double eta = 0.0;
};

Vec project_onto_halfspace(const Vec& x, const HalfSpace& H);

// Q(x,y,z): projection of x onto H(x,y) ∩ H(y,z), where H(x,y) = {u : ⟨u−y, x−y⟩ ≤ 0}.
// With a metric kernel all inner products are ⟨U·,·⟩. Throws EmptyIntersectionError.
Vec haugazeau_combine(const Vec& x, const Vec& y, const Vec& z, const MetricKernel* U = nullptr);

// Cocoercivity constant of the forward part C; nullopt means there is no C.
using CocoConstant = std::optional<double>;

struct CutReport {
    Vec w;                              // graph point
    Vec t_star;                         // cut normal
    double delta = 0.0;                 // δ_n = ⟨x_n − w, t*⟩ − offset
    Vec q;                              // forward probe point
    std::optional<double> relaxation;   // per-iteration λ_n, overrides the schedule
    bool band_exempt = false;           // skip the λ band check (Peaceman–Rachford)
    double residual = 0.0;
    std::vector<Vec> aux;
};

// t* = w* + Cq is folded in by the caller; offset ‖w − q‖²/(4α).
CutReport graph_cut_halfspace(const Vec& x, const Vec& w, const Vec& t_star, const Vec& q, CocoConstant alpha,
                              const MetricKernel* U = nullptr);

// Half-space described by a cut: {z : ⟨z − w, t*⟩ ≤ ‖w − q‖²/(4α)}.
HalfSpace cut_halfspace(const CutReport& c, CocoConstant alpha);

enum class EngineMode { Fejer, Haugazeau };
enum class RunStatus { Converged, MaxIter, Stalled, Failed };

std::string to_string(EngineMode m);
std::string to_string(RunStatus s);
EngineMode parse_mode(const std::string& s);

struct CutContext {
    int n;
    const Vec& x;        // x_n
    const Vec& x_tilde;  // point handed to the resolvents (x_n unless perturbed)
    bool perturbed;      // x_tilde may differ from x
};

using CutOracle = std::function<CutReport(const CutContext&)>;

struct IterationView {
    int n;
    const Vec& x;
    const Vec& x_tilde;
    const CutReport& cut;
    const Vec& x_next;
    double lambda;
};

struct LoopConfig {
    EngineMode mode = EngineMode::Fejer;
    Schedule relaxation = Schedule::constant(1.0);
    double epsilon = 1e-3;
    int max_iter = 1000;
    double tol = 1e-8;
    int stall_limit = 3;
    std::optional<Schedule> inertia;      // α_n for x̃_n = x_n + α_n(x_n − x_{n−1})
    std::optional<Vec> reference;         // known solution, for fejer_gap
    std::optional<MetricKernel> metric;
    bool record_iterates = false;
    bool timing = true;
    std::uint64_t seed = 0;
    std::function<void(const IterationView&)> observer;
};

struct IterRecord {
    int iter = 0;
    double residual = 0.0;
    double disp_norm = 0.0;
    double theta = 0.0;
    double fejer_gap = 0.0;
    double elapsed_ms = 0.0;
    double delta = 0.0;
    double lambda = 0.0;
};

struct RunTrace {
    std::vector<IterRecord> records;
    RunStatus status = RunStatus::MaxIter;
    int iterations = 0;
    std::string message;
    std::vector<Vec> iterates;  // x_0, x_1, ... when record_iterates
    double final_residual() const { return records.empty() ? 0.0 : records.back().residual; }
};

struct EngineResult {
    Vec x;
    RunTrace trace;
};

// Validates λ against [ε, 2−ε] (fejer) or [ε, 1] (haugazeau).
void check_relaxation(double lambda, EngineMode mode, double eps, int n);
void check_epsilon(double eps);

EngineResult outer_loop_run(const CutOracle& oracle, const Vec& x0, const LoopConfig& cfg);

// CSV with header iter,residual,disp_norm,theta,fejer_gap,elapsed_ms.
void trace_write(const RunTrace& trace, std::ostream& os);
void trace_write(const RunTrace& trace, const std::string& path);
std::vector<IterRecord> trace_read(std::istream& is);

}  // namespace splitkit
