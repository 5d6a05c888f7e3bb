#include "seaz/error.hpp"
#include "seaz/lti.hpp"

namespace seaz::lti {

Complex StateSpace::frequency_response(double omega) const {
    if (B.cols() != 1 || C.rows() != 1) {
        throw InvalidInput("frequency_response is defined for SISO realizations only");
    }
    const Eigen::Index n = states();
    if (n == 0) return {D(0, 0), 0.0};
    // Solve on a balanced copy; companion forms are badly scaled.
    Eigen::MatrixXd a = A;
    const Eigen::VectorXd d = balance_matrix(a);
    const Eigen::VectorXd b = B.col(0).cwiseQuotient(d);
    const Eigen::RowVectorXd c = C.row(0).cwiseProduct(d.transpose());
    Eigen::MatrixXcd m = Complex(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) - a.cast<Complex>();
    Eigen::VectorXcd x = m.fullPivLu().solve(b.cast<Complex>());
    return (c.cast<Complex>() * x)(0, 0) + D(0, 0);
}

StateSpace tf_to_state_space(const RationalTF& g) {
    if (!g.is_proper()) {
        throw InvalidInput("tf_to_state_space requires a proper transfer function");
    }
    const int n = g.den().degree();
    const auto& a = g.den().coeffs();  // monic, a[n] == 1
    std::vector<double> b(n + 1, 0.0);
    const auto& nc = g.num().coeffs();
    for (std::size_t i = 0; i < nc.size(); ++i) b[i] = nc[i];

    StateSpace ss;
    ss.A = Eigen::MatrixXd::Zero(n, n);
    ss.B = Eigen::MatrixXd::Zero(n, 1);
    ss.C = Eigen::MatrixXd::Zero(1, n);
    ss.D = Eigen::MatrixXd::Constant(1, 1, b[n]);
    if (n == 0) return ss;

    for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
    for (int j = 0; j < n; ++j) {
        ss.A(n - 1, j) = -a[j];
        ss.C(0, j) = b[j] - b[n] * a[j];
    }
    ss.B(n - 1, 0) = 1.0;
    return ss;
}

}  // namespace seaz::lti
