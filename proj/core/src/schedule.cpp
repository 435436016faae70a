#include "splitkit/schedule.hpp"

#include "splitkit/space.hpp"

#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>

namespace splitkit {

namespace {

double parse_real(const std::string& s) {
    std::string t;
    for (char c : s)
        if (c != ' ' && c != '\t') t += c;
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ParameterError("schedule: cannot parse number '" + s + "'");
    return v;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_real(tok));
    if (out.empty()) throw ParameterError("schedule: empty list");
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Schedule Schedule::constant(double v) {
    Schedule s = custom([v](int) { return v; }, fmt(v));
    s.constant_ = true;
    return s;
}

Schedule Schedule::array(std::vector<double> v) {
    if (v.empty()) throw ParameterError("schedule: empty array");
    std::string d = "array:";
    for (std::size_t i = 0; i < v.size(); ++i) d += (i ? "," : "") + fmt(v[i]);
    auto data = std::make_shared<std::vector<double>>(std::move(v));
    return custom(
        [data](int n) {
            std::size_t i = n < 0 ? 0 : static_cast<std::size_t>(n);
            return (*data)[std::min(i, data->size() - 1)];
        },
        d);
}

Schedule Schedule::power(double c, double p) {
    return custom([c, p](int n) { return c / std::pow(static_cast<double>(n) + 1.0, p); },
                  "power:" + fmt(c) + ":" + fmt(p));
}

Schedule Schedule::custom(std::function<double(int)> f, std::string desc) {
    Schedule s;
    s.f_ = std::move(f);
    s.desc_ = std::move(desc);
    s.constant_ = false;
    return s;
}

Schedule Schedule::parse(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        if (text.find(',') != std::string::npos) return array(parse_list(text));
        return constant(parse_real(text));
    }
    std::string name = text.substr(0, colon), rest = text.substr(colon + 1);
    if (name == "const") return constant(parse_real(rest));
    if (name == "array") return array(parse_list(rest));
    if (name == "harmonic") return power(parse_real(rest), 1.0);
    if (name == "sqrt") return power(parse_real(rest), 0.5);
    if (name == "power") {
        auto c2 = rest.find(':');
        if (c2 == std::string::npos) throw ParameterError("schedule: power needs c:p");
        return power(parse_real(rest.substr(0, c2)), parse_real(rest.substr(c2 + 1)));
    }
    throw ParameterError("schedule: unknown rule '" + name + "'");
}

}  // namespace splitkit
