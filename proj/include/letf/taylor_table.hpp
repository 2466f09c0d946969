#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "letf/errors.hpp"

namespace letf {

/// Taylor coefficients chi_{i,j} = d_x^i d_y^j chi / (i! j!) at (xbar, ybar) for
/// chi in {a, b, c, f}, stored for i + j <= order.
template <class S>
class BasicTaylorTable {
public:
    BasicTaylorTable() : BasicTaylorTable(0) {}
    explicit BasicTaylorTable(int order, double xbar = 0.0, double ybar = 0.0)
        : order_(order), xbar_(xbar), ybar_(ybar) {
        if (order < 0) throw DomainError("Taylor table order must be nonnegative");
        const std::size_t n = index(0, order) + 1;
        a_.assign(n, S(0));
        b_.assign(n, S(0));
        c_.assign(n, S(0));
        f_.assign(n, S(0));
    }

    int order() const noexcept { return order_; }
    double xbar() const noexcept { return xbar_; }
    double ybar() const noexcept { return ybar_; }

    S& a(int i, int j) { return a_[checked(i, j)]; }
    S& b(int i, int j) { return b_[checked(i, j)]; }
    S& c(int i, int j) { return c_[checked(i, j)]; }
    S& f(int i, int j) { return f_[checked(i, j)]; }
    const S& a(int i, int j) const { return a_[checked(i, j)]; }
    const S& b(int i, int j) const { return b_[checked(i, j)]; }
    const S& c(int i, int j) const { return c_[checked(i, j)]; }
    const S& f(int i, int j) const { return f_[checked(i, j)]; }

    bool contains(int i, int j) const noexcept { return i >= 0 && j >= 0 && i + j <= order_; }

private:
    static std::size_t index(int i, int j) {
        const int d = i + j;
        return static_cast<std::size_t>(d * (d + 1) / 2 + j);
    }
    std::size_t checked(int i, int j) const {
        if (!contains(i, j))
            throw DomainError("Taylor coefficient (" + std::to_string(i) + "," +
                              std::to_string(j) + ") outside table of order " +
                              std::to_string(order_));
        return index(i, j);
    }

    int order_;
    double xbar_;
    double ybar_;
    std::vector<S> a_, b_, c_, f_;
};

using TaylorTable = BasicTaylorTable<double>;

}  // namespace letf
