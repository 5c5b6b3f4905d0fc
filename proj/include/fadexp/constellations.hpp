#pragma once

#include <complex>
#include <string>
#include <vector>

namespace fadexp {

using cplx = std::complex<double>;

enum class InputKind { Discrete, InfPSK, InfPAM, InfQAM, Gaussian };

class Constellation {
public:
    // Validates and, if the probabilities are off by less than 1e-9,
    // renormalizes them.
    static Constellation discrete(std::vector<cplx> points, std::vector<double> probs,
                                  std::string label);
    static Constellation continuous(InputKind kind);

    InputKind kind() const { return kind_; }
    bool is_discrete() const { return kind_ == InputKind::Discrete; }
    const std::vector<cplx>& points() const { return points_; }
    const std::vector<double>& probs() const { return probs_; }
    const std::string& label() const { return label_; }
    std::size_t size() const { return points_.size(); }

private:
    InputKind kind_ = InputKind::Gaussian;
    std::vector<cplx> points_;
    std::vector<double> probs_;
    std::string label_;
};

Constellation make_psk(int m);
Constellation make_pam(int m);
Constellation make_qam(int m);
Constellation make_gaussian();
Constellation make_inf_psk();
Constellation make_inf_pam();
Constellation make_inf_qam();

// Names like "bpsk", "qpsk", "8psk", "4pam", "16qam", "gaussian", "infpsk".
Constellation constellation_by_name(const std::string& name);

double min_distance(const Constellation& c);
double power(const Constellation& c);
double variance(const Constellation& c);
double entropy(const Constellation& c); // nats, discrete only

// Real one-dimensional factor with probabilities.
struct Axis {
    std::vector<double> points;
    std::vector<double> probs;
};

// A discrete constellation whose points all lie on the real axis reduces to
// one axis; a product set {a + ib} with product probabilities to two.
// Returns an empty vector when neither applies.
std::vector<Axis> separable_axes(const Constellation& c);

}  // namespace fadexp
