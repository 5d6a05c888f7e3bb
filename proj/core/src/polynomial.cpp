#include "seaz/error.hpp"
#include "seaz/lti.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace seaz::lti {

Polynomial::Polynomial(std::vector<double> ascending) : coeffs_(std::move(ascending)) {
    if (coeffs_.empty()) {
        throw InvalidInput("polynomial needs at least one coefficient");
    }
    for (double c : coeffs_) {
        if (!std::isfinite(c)) {
            throw InvalidInput("polynomial coefficient is not finite");
        }
    }
    trim();
}

void Polynomial::trim() {
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) {
        coeffs_.pop_back();
    }
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots, double leading) {
    std::vector<Complex> c{Complex(leading, 0.0)};
    for (const Complex& r : roots) {
        std::vector<Complex> next(c.size() + 1, Complex(0.0, 0.0));
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= r * c[i];
        }
        c = std::move(next);
    }
    std::vector<double> re(c.size());
    std::transform(c.begin(), c.end(), re.begin(), [](Complex z) { return z.real(); });
    return Polynomial(std::move(re));
}

double Polynomial::norm() const {
    double acc = 0.0;
    for (double c : coeffs_) acc += c * c;
    return std::sqrt(acc);
}

Complex Polynomial::operator()(Complex s) const {
    Complex acc(0.0, 0.0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

double Polynomial::operator()(double s) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

int Polynomial::zero_root_multiplicity() const {
    if (is_zero()) return 0;
    int k = 0;
    while (coeffs_[k] == 0.0) ++k;
    return k;
}

Polynomial Polynomial::shifted_down(int k) const {
    if (k < 0 || k > zero_root_multiplicity()) {
        throw InvalidInput("cannot divide polynomial by s^k");
    }
    return Polynomial(std::vector<double>(coeffs_.begin() + k, coeffs_.end()));
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() == 1) return Polynomial::constant(0.0);
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) {
        d[i - 1] = static_cast<double>(i) * coeffs_[i];
    }
    return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
    return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial::constant(0.0);
    std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
            c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
    }
    return Polynomial(std::move(c));
}

Polynomial operator*(double k, const Polynomial& p) {
    std::vector<double> c = p.coeffs_;
    for (double& x : c) x *= k;
    return Polynomial(std::move(c));
}

namespace {

Complex newton_polish(const Polynomial& p, const Polynomial& dp, Complex r) {
    const double scale = p.norm();
    const Complex start = r;
    const double max_move = 1e-6 * std::max(1.0, std::abs(r));
    Complex best = r;
    double best_res = std::abs(p(r));
    for (int it = 0; it < 8; ++it) {
        const Complex d = dp(r);
        if (std::abs(d) == 0.0) break;
        const Complex next = r - p(r) / d;
        const double res = std::abs(p(next));
        if (!std::isfinite(res) || std::abs(next - start) > max_move) break;
        r = next;
        if (res < best_res) {
            best_res = res;
            best = next;
        }
        if (res <= 1e-15 * scale) break;
    }
    return best;
}

}  // namespace

Eigen::VectorXd balance_matrix(Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
    constexpr double radix = 2.0;
    bool done = false;
    for (int sweep = 0; sweep < 100 && !done; ++sweep) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                d(i) *= f;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
    return d;
}

std::vector<Complex> poly_roots(const Polynomial& p) {
    if (p.degree() < 1) {
        throw InvalidInput("poly_roots requires degree >= 1");
    }
    const int zeros_at_origin = p.zero_root_multiplicity();
    std::vector<Complex> roots(zeros_at_origin, Complex(0.0, 0.0));
    const Polynomial q = p.shifted_down(zeros_at_origin);
    const int n = q.degree();
    if (n == 0) return roots;

    const auto& c = q.coeffs();
    const double an = c[n];
    // Rescale s = sigma * x so the constant and leading terms have equal magnitude.
    const double sigma = std::pow(std::abs(c[0] / an), 1.0 / n);
    std::vector<double> b(n + 1);
    double pw = 1.0;
    for (int i = 0; i <= n; ++i) {
        b[i] = c[i] * pw / (an * std::pow(sigma, n));
        pw *= sigma;
    }

    if (n == 1) {
        roots.emplace_back(-b[0] * sigma, 0.0);
    } else {
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < n; ++i) comp(i, n - 1) = -b[i];
        balance_matrix(comp);
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        if (es.info() != Eigen::Success) {
            throw NumericalError("companion eigenvalue iteration did not converge");
        }
        const Polynomial dq = q.derivative();
        for (int i = 0; i < n; ++i) {
            roots.push_back(newton_polish(q, dq, es.eigenvalues()(i) * sigma));
        }
    }
    return roots;
}

}  // namespace seaz::lti
