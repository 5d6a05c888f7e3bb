#pragma once

// Continuous-time SISO transfer-function algebra.
//
// Polynomials store real coefficients in ascending powers of the Laplace
// variable s. Rational functions keep the denominator monic. Arithmetic is
// exact over the coefficient vectors; the only cancellation ever performed is
// removal of a common factor s^k whose coefficients are exactly zero in both
// numerator and denominator.

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace seaz::lti {

using Complex = std::complex<double>;

class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    Polynomial(std::initializer_list<double> ascending) : Polynomial(std::vector<double>(ascending)) {}
    explicit Polynomial(std::vector<double> ascending);

    static Polynomial constant(double c) { return Polynomial(std::vector<double>{c}); }
    static Polynomial s() { return Polynomial{0.0, 1.0}; }
    static Polynomial from_roots(std::span<const Complex> roots, double leading = 1.0);

    const std::vector<double>& coeffs() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    double leading() const { return coeffs_.back(); }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
    double norm() const;

    Complex operator()(Complex s) const;
    double operator()(double s) const;

    // Number of exactly-zero low-order coefficients (multiplicity of the root at 0).
    int zero_root_multiplicity() const;
    Polynomial shifted_down(int k) const;  // divide by s^k; requires k <= zero_root_multiplicity()
    Polynomial derivative() const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double k, const Polynomial& p);
    Polynomial operator-() const { return (-1.0) * *this; }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void trim();
    std::vector<double> coeffs_;
};

// Osborne balancing in place: a <- D^-1 a D with D = diag(returned vector).
Eigen::VectorXd balance_matrix(Eigen::MatrixXd& a);

// All deg(p) roots with multiplicity. Throws InvalidInput for degree 0.
std::vector<Complex> poly_roots(const Polynomial& p);

class RationalTF {
public:
    RationalTF() : RationalTF(Polynomial::constant(0.0), Polynomial::constant(1.0)) {}
    RationalTF(Polynomial num, Polynomial den);
    RationalTF(double gain) : RationalTF(Polynomial::constant(gain), Polynomial::constant(1.0)) {}  // NOLINT

    static RationalTF integrator() { return {Polynomial::constant(1.0), Polynomial::s()}; }
    static RationalTF differentiator() { return {Polynomial::s(), Polynomial::constant(1.0)}; }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_proper() const { return num_.degree() <= den_.degree(); }
    bool is_biproper() const { return !is_zero() && num_.degree() == den_.degree(); }
    int relative_degree() const { return den_.degree() - num_.degree(); }

    Complex operator()(Complex s) const { return num_(s) / den_(s); }
    Complex at_frequency(double omega) const { return (*this)(Complex(0.0, omega)); }

    std::vector<Complex> poles() const;
    std::vector<Complex> zeros() const;

    RationalTF inverse() const;

    friend RationalTF operator+(const RationalTF& a, const RationalTF& b);
    friend RationalTF operator-(const RationalTF& a, const RationalTF& b);
    friend RationalTF operator*(const RationalTF& a, const RationalTF& b);
    friend RationalTF operator/(const RationalTF& a, const RationalTF& b);
    RationalTF operator-() const { return {-num_, den_}; }

private:
    void normalize();
    Polynomial num_;
    Polynomial den_;
};

enum class CombineKind { Add, Mul, Scale };

RationalTF tf_combine(CombineKind kind, const RationalTF& a, const RationalTF& b);
RationalTF tf_combine(CombineKind kind, const RationalTF& a, double b);

// Negative-feedback interconnection a / (1 + a b).
RationalTF tf_feedback(const RationalTF& a, const RationalTF& b);

class FrequencyGrid {
public:
    explicit FrequencyGrid(std::vector<double> omegas);

    static FrequencyGrid log_spaced(double lo, double hi, std::size_t points = 400);
    static FrequencyGrid per_decade(double lo, double hi, std::size_t points_per_decade);

    const std::vector<double>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }

    // Union with extra points inside [front, back]; keeps ordering strict.
    FrequencyGrid with_points(std::span<const double> extra) const;

private:
    std::vector<double> points_;
};

struct FrequencySample {
    double omega = 0.0;
    Complex value;
    bool singular = false;
};

std::vector<FrequencySample> freq_response(const RationalTF& g, const FrequencyGrid& grid);

enum class Stability { Stable, Marginal, Unstable };

// Default tolerance is 1e-9 * max(1, |largest pole|).
Stability is_stable(const RationalTF& g, double tol = -1.0);
Stability classify_poles(std::span<const Complex> poles, double tol = -1.0);

struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;

    Eigen::Index states() const { return A.rows(); }
    Complex frequency_response(double omega) const;  // SISO
};

// Controllable canonical realization. Throws InvalidInput when improper.
StateSpace tf_to_state_space(const RationalTF& g);

}  // namespace seaz::lti
