#include "seaz/error.hpp"
#include "seaz/lti.hpp"

#include <algorithm>

namespace seaz::lti {

RationalTF::RationalTF(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) {
        throw InvalidInput("transfer function denominator is identically zero");
    }
    normalize();
}

void RationalTF::normalize() {
    if (num_.is_zero()) {
        den_ = Polynomial::constant(1.0);
        return;
    }
    const int k = std::min(num_.zero_root_multiplicity(), den_.zero_root_multiplicity());
    if (k > 0) {
        num_ = num_.shifted_down(k);
        den_ = den_.shifted_down(k);
    }
    const double lead = den_.leading();
    if (lead != 1.0) {
        num_ = (1.0 / lead) * num_;
        den_ = (1.0 / lead) * den_;
    }
}

std::vector<Complex> RationalTF::poles() const {
    if (den_.degree() == 0) return {};
    return poly_roots(den_);
}

std::vector<Complex> RationalTF::zeros() const {
    if (num_.degree() == 0) return {};
    return poly_roots(num_);
}

RationalTF RationalTF::inverse() const {
    if (num_.is_zero()) {
        throw SingularError("cannot invert the zero transfer function");
    }
    return {den_, num_};
}

RationalTF operator+(const RationalTF& a, const RationalTF& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

RationalTF operator-(const RationalTF& a, const RationalTF& b) { return a + (-b); }

RationalTF operator*(const RationalTF& a, const RationalTF& b) {
    if (a.is_zero() || b.is_zero()) return RationalTF(0.0);
    return {a.num_ * b.num_, a.den_ * b.den_};
}

RationalTF operator/(const RationalTF& a, const RationalTF& b) { return a * b.inverse(); }

RationalTF tf_combine(CombineKind kind, const RationalTF& a, const RationalTF& b) {
    switch (kind) {
        case CombineKind::Add:
            return a + b;
        case CombineKind::Mul:
            return a * b;
        case CombineKind::Scale:
            if (b.num().degree() != 0 || b.den().degree() != 0) {
                throw InvalidInput("scale requires a static gain operand");
            }
            return a * b;
    }
    throw InvalidInput("unknown combine kind");
}

RationalTF tf_combine(CombineKind kind, const RationalTF& a, double b) {
    return tf_combine(kind, a, RationalTF(b));
}

RationalTF tf_feedback(const RationalTF& a, const RationalTF& b) {
    // a/(1+ab) with a = na/da, b = nb/db  ->  na db / (da db + na nb)
    const Polynomial den = a.den() * b.den() + a.num() * b.num();
    if (den.is_zero()) {
        throw SingularError("feedback loop 1 + a*b is identically zero");
    }
    return {a.num() * b.den(), den};
}

}  // namespace seaz::lti
