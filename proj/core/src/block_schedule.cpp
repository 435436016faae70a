#include "splitkit/projective.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace splitkit {

namespace {

BlockStep full_step(int m, int p, int n) {
    BlockStep s;
    for (int i = 0; i < m; ++i) {
        s.I.push_back(i);
        s.pi.push_back(n);
    }
    for (int k = 0; k < p; ++k) {
        s.K.push_back(k);
        s.omega.push_back(n);
    }
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
    return out;
}

int parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParameterError("schedule: bad " + what + " '" + s + "'");
    }
}

// "i3" -> 2
int parse_name(const std::string& s, char prefix, int line) {
    if (s.size() < 2 || s[0] != prefix)
        throw ParameterError("schedule line " + std::to_string(line) + ": expected " + prefix + "<index>, got '" + s +
                             "'");
    int v = parse_int(s.substr(1), "operator index");
    if (v < 1) throw ParameterError("schedule line " + std::to_string(line) + ": operator indices start at 1");
    return v - 1;
}

// "n", "n-2", "17"
int parse_delay(const std::string& s, int n, int line) {
    std::string t;
    for (char c : s)
        if (c != ' ') t += c;
    // U+2212 minus sign is accepted as well as '-'
    const std::string minus = "\xE2\x88\x92";
    for (std::size_t pos; (pos = t.find(minus)) != std::string::npos;) t.replace(pos, minus.size(), "-");
    if (t == "n") return n;
    if (t.rfind("n-", 0) == 0) return n - parse_int(t.substr(2), "delay");
    if (t.rfind("n+", 0) == 0) return n + parse_int(t.substr(2), "delay");
    if (t.empty()) throw ParameterError("schedule line " + std::to_string(line) + ": empty delay");
    return parse_int(t, "delay");
}

}  // namespace

BlockStep BlockSchedule::step(int n) const {
    if (n >= 0 && static_cast<std::size_t>(n) < steps.size()) return steps[n];
    return full_step(m, p, n);
}

BlockScheduleKind parse_block_schedule_kind(const std::string& s) {
    if (s == "full") return BlockScheduleKind::Full;
    if (s == "round_robin") return BlockScheduleKind::RoundRobin;
    if (s == "random_with_cover" || s == "random") return BlockScheduleKind::RandomWithCover;
    throw ParameterError("unknown schedule kind '" + s + "' (expected full | round_robin | random_with_cover)");
}

std::string to_string(BlockScheduleKind k) {
    switch (k) {
        case BlockScheduleKind::Full: return "full";
        case BlockScheduleKind::RoundRobin: return "round_robin";
        case BlockScheduleKind::RandomWithCover: return "random_with_cover";
    }
    return "?";
}

BlockSchedule make_block_schedule(BlockScheduleKind kind, int m, int p, int R, int T, std::uint64_t seed,
                                  int horizon) {
    if (R < 1) throw ParameterError("block schedule infeasible: R ≥ 1 required, got R = " + std::to_string(R));
    if (T < 0) throw ParameterError("block schedule: T ≥ 0 required, got T = " + std::to_string(T));
    if (m < 1 || p < 0) throw ParameterError("block schedule: need m ≥ 1 and p ≥ 0");
    if (horizon < 1) throw ParameterError("block schedule: horizon must be positive");

    BlockSchedule s;
    s.m = m;
    s.p = p;
    s.R = R;
    s.T = T;
    if (kind == BlockScheduleKind::Full) return s;

    s.steps.reserve(horizon);

    if (kind == BlockScheduleKind::RoundRobin) {
        s.steps.push_back(full_step(m, p, 0));
        // ceil(count/R) consecutive indices per step cover every index within R steps.
        auto chunk = [R](int count) { return (count + R - 1) / R; };
        int ci = chunk(m), ck = chunk(p);
        for (int n = 1; n < horizon; ++n) {
            BlockStep st;
            int lag = std::max(0, n - T);
            std::set<int> I, K;
            for (int j = 0; j < ci; ++j) I.insert(((n - 1) * ci + j) % m);
            for (int j = 0; j < ck && p > 0; ++j) K.insert(((n - 1) * ck + j) % p);
            for (int i : I) {
                st.I.push_back(i);
                st.pi.push_back(lag);
            }
            for (int k : K) {
                st.K.push_back(k);
                st.omega.push_back(lag);
            }
            s.steps.push_back(std::move(st));
        }
        return s;
    }

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<std::set<int>> Is(horizon), Ks(horizon);
    for (int i = 0; i < m; ++i) Is[0].insert(i);
    for (int k = 0; k < p; ++k) Ks[0].insert(k);
    for (int n = 1; n < horizon; ++n) {
        for (int i = 0; i < m; ++i)
            if (coin(rng)) Is[n].insert(i);
        for (int k = 0; k < p; ++k)
            if (coin(rng)) Ks[n].insert(k);
        if (Is[n].empty()) Is[n].insert(static_cast<int>(rng() % m));
        if (Ks[n].empty() && p > 0) Ks[n].insert(static_cast<int>(rng() % p));
    }
    // Patch: an index missing from window [n, n+R−1] is added at its last step.
    for (int n = 0; n + R - 1 < horizon; ++n) {
        int last = n + R - 1;
        for (int i = 0; i < m; ++i) {
            bool seen = false;
            for (int j = n; j <= last && !seen; ++j) seen = Is[j].count(i) > 0;
            if (!seen) Is[last].insert(i);
        }
        for (int k = 0; k < p; ++k) {
            bool seen = false;
            for (int j = n; j <= last && !seen; ++j) seen = Ks[j].count(k) > 0;
            if (!seen) Ks[last].insert(k);
        }
    }
    for (int n = 0; n < horizon; ++n) {
        BlockStep st;
        std::uniform_int_distribution<int> d(0, std::min(T, n));
        for (int i : Is[n]) {
            st.I.push_back(i);
            st.pi.push_back(n - d(rng));
        }
        for (int k : Ks[n]) {
            st.K.push_back(k);
            st.omega.push_back(n - d(rng));
        }
        s.steps.push_back(std::move(st));
    }
    return s;
}

std::vector<std::string> validate_block_schedule(const BlockSchedule& s) {
    std::vector<std::string> bad;
    if (s.R < 1) bad.push_back("R ≥ 1 violated (R = " + std::to_string(s.R) + ")");
    if (s.T < 0) bad.push_back("T ≥ 0 violated (T = " + std::to_string(s.T) + ")");
    if (s.m < 1 || s.p < 0) bad.push_back("need m ≥ 1 and p ≥ 0");
    if (!bad.empty()) return bad;

    const int N = static_cast<int>(s.steps.size());
    auto here = [](int n) { return "n = " + std::to_string(n) + ": "; };
    for (int n = 0; n < N; ++n) {
        const BlockStep& st = s.steps[n];
        if (st.pi.size() != st.I.size() || st.omega.size() != st.K.size())
            bad.push_back(here(n) + "delay lists do not match the activation sets");
        if (st.I.empty()) bad.push_back(here(n) + "I_n must be nonempty");
        if (st.K.empty() && s.p > 0) bad.push_back(here(n) + "K_n must be nonempty");
        std::set<int> seenI, seenK;
        for (std::size_t j = 0; j < st.I.size(); ++j) {
            int i = st.I[j];
            if (i < 0 || i >= s.m) bad.push_back(here(n) + "operator index i" + std::to_string(i + 1) + " out of range");
            if (!seenI.insert(i).second) bad.push_back(here(n) + "i" + std::to_string(i + 1) + " listed twice");
            if (j < st.pi.size()) {
                int v = st.pi[j];
                if (!(n - s.T <= v && v <= n) || v < 0)
                    bad.push_back(here(n) + "n−T ≤ π_i(n) ≤ n violated for i" + std::to_string(i + 1) +
                                  " (π = " + std::to_string(v) + ", T = " + std::to_string(s.T) + ")");
            }
        }
        for (std::size_t j = 0; j < st.K.size(); ++j) {
            int k = st.K[j];
            if (k < 0 || k >= s.p) bad.push_back(here(n) + "operator index k" + std::to_string(k + 1) + " out of range");
            if (!seenK.insert(k).second) bad.push_back(here(n) + "k" + std::to_string(k + 1) + " listed twice");
            if (j < st.omega.size()) {
                int v = st.omega[j];
                if (!(n - s.T <= v && v <= n) || v < 0)
                    bad.push_back(here(n) + "n−T ≤ ω_k(n) ≤ n violated for k" + std::to_string(k + 1) +
                                  " (ω = " + std::to_string(v) + ", T = " + std::to_string(s.T) + ")");
            }
        }
        if (n == 0 && (static_cast<int>(seenI.size()) != s.m || static_cast<int>(seenK.size()) != s.p))
            bad.push_back("I_0=I, K_0=K violated");
    }
    // Windows reaching past the explicit steps end in full steps and are covered.
    for (int n = 0; n + s.R - 1 < N; ++n) {
        std::set<int> I, K;
        for (int j = n; j < n + s.R; ++j) {
            I.insert(s.steps[j].I.begin(), s.steps[j].I.end());
            K.insert(s.steps[j].K.begin(), s.steps[j].K.end());
        }
        if (static_cast<int>(I.size()) < s.m)
            bad.push_back("⋃_{j=n}^{n+R−1} I_j = I violated at n = " + std::to_string(n));
        if (static_cast<int>(K.size()) < s.p)
            bad.push_back("⋃_{j=n}^{n+R−1} K_j = K violated at n = " + std::to_string(n));
    }
    return bad;
}

void require_valid_schedule(const BlockSchedule& s) {
    auto bad = validate_block_schedule(s);
    if (bad.empty()) return;
    std::string msg = "invalid block schedule: " + bad.front();
    for (std::size_t j = 1; j < bad.size() && j < 8; ++j) msg += "; " + bad[j];
    if (bad.size() > 8) msg += "; ... (" + std::to_string(bad.size()) + " violations)";
    throw ParameterError(msg);
}

BlockSchedule read_block_schedule(std::istream& is) {
    BlockSchedule s;
    bool have_m = false, have_p = false;
    int max_i = -1, max_k = -1;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string ln = trim(raw);
        if (ln.empty()) continue;
        if (ln[0] == '#') {
            for (const auto& kv : split(ln.substr(1), ' ')) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
                if (k == "m") s.m = parse_int(v, "m"), have_m = true;
                else if (k == "p") s.p = parse_int(v, "p"), have_p = true;
                else if (k == "R") s.R = parse_int(v, "R");
                else if (k == "T") s.T = parse_int(v, "T");
            }
            continue;
        }
        auto fields = split(ln, '|');
        int n = parse_int(fields.at(0), "iteration number");
        if (n != static_cast<int>(s.steps.size()))
            throw ParameterError("schedule line " + std::to_string(line) + ": expected iteration " +
                                 std::to_string(s.steps.size()) + ", got " + std::to_string(n));
        BlockStep st;
        std::vector<std::pair<int, int>> pis, oms;
        for (std::size_t f = 1; f < fields.size(); ++f) {
            auto colon = fields[f].find(':');
            if (colon == std::string::npos)
                throw ParameterError("schedule line " + std::to_string(line) + ": field '" + fields[f] + "' lacks ':'");
            std::string key = trim(fields[f].substr(0, colon));
            std::string body = trim(fields[f].substr(colon + 1));
            auto items = body.empty() ? std::vector<std::string>{} : split(body, ',');
            if (key == "I") {
                for (auto& it : items) st.I.push_back(parse_name(it, 'i', line));
            } else if (key == "K") {
                for (auto& it : items) st.K.push_back(parse_name(it, 'k', line));
            } else if (key == "pi" || key == "omega") {
                char pre = key == "pi" ? 'i' : 'k';
                for (auto& it : items) {
                    auto eq = it.find('=');
                    if (eq == std::string::npos)
                        throw ParameterError("schedule line " + std::to_string(line) + ": expected name=delay, got '" +
                                             it + "'");
                    int idx = parse_name(trim(it.substr(0, eq)), pre, line);
                    int v = parse_delay(it.substr(eq + 1), n, line);
                    (key == "pi" ? pis : oms).emplace_back(idx, v);
                }
            } else {
                throw ParameterError("schedule line " + std::to_string(line) + ": unknown field '" + key + "'");
            }
        }
        auto lookup = [&](const std::vector<std::pair<int, int>>& d, int idx, const std::vector<int>& act,
                          const char* what) {
            for (auto& [j, v] : d)
                if (std::find(act.begin(), act.end(), j) == act.end())
                    throw ParameterError("schedule line " + std::to_string(line) + ": " + what +
                                         " given for an inactive operator");
            for (auto& [j, v] : d)
                if (j == idx) return v;
            return n;
        };
        for (int i : st.I) st.pi.push_back(lookup(pis, i, st.I, "pi")), max_i = std::max(max_i, i);
        for (int k : st.K) st.omega.push_back(lookup(oms, k, st.K, "omega")), max_k = std::max(max_k, k);
        s.steps.push_back(std::move(st));
    }
    if (!have_m) s.m = max_i + 1;
    if (!have_p) s.p = max_k + 1;
    if (max_i >= s.m || max_k >= s.p)
        throw ParameterError("schedule names an operator beyond the header's m = " + std::to_string(s.m) +
                             ", p = " + std::to_string(s.p));
    return s;
}

BlockSchedule read_block_schedule_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParameterError("cannot open schedule file '" + path + "'");
    return read_block_schedule(f);
}

void write_block_schedule(const BlockSchedule& s, std::ostream& os) {
    os << "# m=" << s.m << " p=" << s.p << " R=" << s.R << " T=" << s.T << '\n';
    auto delay = [](int v, int n) {
        if (v == n) return std::string("n");
        if (v < n) return "n-" + std::to_string(n - v);
        return std::to_string(v);
    };
    for (std::size_t n = 0; n < s.steps.size(); ++n) {
        const BlockStep& st = s.steps[n];
        const int nn = static_cast<int>(n);
        os << n << " | I: ";
        for (std::size_t j = 0; j < st.I.size(); ++j) os << (j ? "," : "") << 'i' << st.I[j] + 1;
        os << " | K: ";
        for (std::size_t j = 0; j < st.K.size(); ++j) os << (j ? "," : "") << 'k' << st.K[j] + 1;
        os << " | pi: ";
        for (std::size_t j = 0; j < st.I.size() && j < st.pi.size(); ++j)
            os << (j ? "," : "") << 'i' << st.I[j] + 1 << '=' << delay(st.pi[j], nn);
        os << " | omega: ";
        for (std::size_t j = 0; j < st.K.size() && j < st.omega.size(); ++j)
            os << (j ? "," : "") << 'k' << st.K[j] + 1 << '=' << delay(st.omega[j], nn);
        os << '\n';
    }
}

}  // namespace splitkit
