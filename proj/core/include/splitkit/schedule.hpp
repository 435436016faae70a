#pragma once

#include <functional>
#include <string>
#include <vector>

namespace splitkit {

// Real sequence indexed by iteration n ≥ 0.
class Schedule {
public:
    Schedule() : f_([](int) { return 1.0; }), desc_("1"), constant_(true) {}

    static Schedule constant(double v);
    // Values for n = 0..k−1, then the last value repeats.
    static Schedule array(std::vector<double> v);
    // c/(n+1)^p.
    static Schedule power(double c, double p);
    static Schedule custom(std::function<double(int)> f, std::string desc);

    // Text forms: "0.5", "0.5,1,1.5" (array), "const:0.5", "array:0.5,1",
    // "harmonic:c" (c/(n+1)), "sqrt:c" (c/√(n+1)), "power:c:p".
    static Schedule parse(const std::string& text);

    double operator()(int n) const { return f_(n); }
    const std::string& describe() const { return desc_; }
    bool is_constant() const { return constant_; }

private:
    std::function<double(int)> f_;
    std::string desc_;
    bool constant_ = false;
};

}  // namespace splitkit
