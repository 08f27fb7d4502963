#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "star/rational.hpp"
#include "star/types.hpp"

namespace star {

using Multi = std::vector<int32_t>;

// Sparse polynomial in `nvars` commuting variables; no zero coefficients stored.
template <class T>
class Poly {
  public:
    using Terms = std::map<Multi, T>;

    Poly() : nvars_(0) {}
    explicit Poly(int nvars) : nvars_(nvars) {}

    static Poly constant(int nvars, const T& c) {
        Poly p(nvars);
        if (!scalar_traits<T>::is_zero(c)) p.terms_[Multi(nvars, 0)] = c;
        return p;
    }
    static Poly one(int nvars) { return constant(nvars, scalar_traits<T>::one()); }
    static Poly variable(int nvars, int i, const T& c = scalar_traits<T>::one()) {
        Poly p(nvars);
        Multi e(nvars, 0);
        e[i] = 1;
        if (!scalar_traits<T>::is_zero(c)) p.terms_[e] = c;
        return p;
    }

    int nvars() const { return nvars_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (int v : e) s += v;
            d = std::max(d, s);
        }
        return d;
    }

    void add_term(const Multi& e, const T& c) {
        if (scalar_traits<T>::is_zero(c)) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
        } else {
            it->second += c;
            if (scalar_traits<T>::is_zero(it->second)) terms_.erase(it);
        }
    }

    T coeff(const Multi& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? scalar_traits<T>::zero() : it->second;
    }

    Poly& operator+=(const Poly& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    Poly operator-() const {
        Poly r(nvars_);
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check_same(b);
        Poly r(a.nvars_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Multi e(ea);
                for (int i = 0; i < a.nvars_; ++i) e[i] += eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly scaled(const T& c) const {
        Poly r(nvars_);
        if (scalar_traits<T>::is_zero(c)) return r;
        for (const auto& [e, k] : terms_) r.terms_[e] = k * c;
        return r;
    }

    Poly derivative(int i) const {
        Poly r(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) continue;
            Multi d(e);
            d[i] -= 1;
            r.add_term(d, c * scalar_traits<T>::from_int(e[i]));
        }
        return r;
    }

    template <class Pt>
    auto eval(const Pt& u) const {
        using V = std::decay_t<decltype(u[0])>;
        V acc = V(0);
        for (const auto& [e, c] : terms_) {
            V mono = to_value<V>(c);
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) mono *= u[i];
            acc += mono;
        }
        return acc;
    }

    // Substitute u_i -> u_i + s_i (affine shift), same variable count.
    Poly shifted(const std::vector<T>& s) const {
        Poly r(nvars_);
        for (const auto& [e, c] : terms_) {
            Poly mono = constant(nvars_, c);
            for (int i = 0; i < nvars_; ++i) {
                if (e[i] == 0) continue;
                Poly lin = variable(nvars_, i);
                lin.add_term(Multi(nvars_, 0), s[i]);
                for (int k = 0; k < e[i]; ++k) mono *= lin;
            }
            r += mono;
        }
        return r;
    }

    // Embed into a polynomial with more variables, variable i -> variable map[i].
    Poly embedded(int new_nvars, const std::vector<int>& map) const {
        Poly r(new_nvars);
        for (const auto& [e, c] : terms_) {
            Multi ne(new_nvars, 0);
            for (int i = 0; i < nvars_; ++i) ne[map[i]] = e[i];
            r.add_term(ne, c);
        }
        return r;
    }

    // Set variables listed in `vars` to zero, keeping the variable count.
    Poly restricted_zero(const std::vector<int>& vars) const {
        Poly r(nvars_);
        for (const auto& [e, c] : terms_) {
            bool keep = true;
            for (int v : vars)
                if (e[v] != 0) {
                    keep = false;
                    break;
                }
            if (keep) r.add_term(e, c);
        }
        return r;
    }

    bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  private:
    template <class V>
    static V to_value(const T& c) {
        if constexpr (std::is_same_v<T, RatC>) {
            return V(static_cast<double>(c.re), static_cast<double>(c.im));
        } else {
            return V(c);
        }
    }
    void check_same(const Poly& o) const {
        if (nvars_ != o.nvars_) throw std::invalid_argument("dimension mismatch between polynomials");
    }

    int nvars_;
    Terms terms_;
};

using PolyC = Poly<Cx>;
using PolyQ = Poly<RatC>;

PolyC to_complex(const PolyQ& p);
double max_abs_coeff(const PolyC& p);

}  // namespace star
