#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace scx {

inline constexpr int kMaxDim = 3;

/// Fixed-capacity vector for points and gradients in dimension 1..3.
class Vec {
public:
    Vec() = default;
    explicit Vec(int dim) : dim_(dim) {
        if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("Vec: dimension must be in [0,3]");
    }
    Vec(std::initializer_list<double> values) : Vec(static_cast<int>(values.size())) {
        int k = 0;
        for (double v : values) c_[k++] = v;
    }

    static Vec from(std::span<const double> values) {
        Vec out(static_cast<int>(values.size()));
        for (int k = 0; k < out.dim_; ++k) out.c_[k] = values[k];
        return out;
    }
    static Vec unit(int dim, int axis) {
        Vec out(dim);
        out.c_[axis] = 1.0;
        return out;
    }

    int dim() const { return dim_; }
    double operator[](int k) const { return c_[k]; }
    double& operator[](int k) { return c_[k]; }
    const double* data() const { return c_.data(); }
    std::vector<double> to_vector() const { return {c_.begin(), c_.begin() + dim_}; }

    Vec& operator+=(const Vec& o) {
        for (int k = 0; k < dim_; ++k) c_[k] += o.c_[k];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int k = 0; k < dim_; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int k = 0; k < dim_; ++k) c_[k] *= s;
        return *this;
    }
    Vec& operator/=(double s) {
        for (int k = 0; k < dim_; ++k) c_[k] /= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator-(Vec a) { return a *= -1.0; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator/(Vec a, double s) { return a /= s; }
    friend bool operator==(const Vec& a, const Vec& b) {
        if (a.dim_ != b.dim_) return false;
        for (int k = 0; k < a.dim_; ++k)
            if (a.c_[k] != b.c_[k]) return false;
        return true;
    }

private:
    std::array<double, kMaxDim> c_{};
    int dim_ = 0;
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int k = 0; k < a.dim(); ++k) s += a[k] * b[k];
    return s;
}
inline double squared_norm(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(squared_norm(a)); }
inline double distance(const Vec& a, const Vec& b) { return norm(a - b); }

/// Lexicographic order, used wherever a deterministic sort of vectors is needed.
inline bool lex_less(const Vec& a, const Vec& b) {
    for (int k = 0; k < a.dim(); ++k) {
        if (a[k] < b[k]) return true;
        if (a[k] > b[k]) return false;
    }
    return false;
}

inline std::string to_string(const Vec& v) {
    std::string s = "(";
    for (int k = 0; k < v.dim(); ++k) {
        if (k) s += ", ";
        s += std::to_string(v[k]);
    }
    return s + ")";
}

}  // namespace scx
