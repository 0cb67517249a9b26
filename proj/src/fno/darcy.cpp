#include "fno/darcy.hpp"

#include <cmath>

namespace fno {

namespace {

struct Stencil {
    // per interior unknown: the four face coefficients scaled by 1/h^2
    std::vector<double> north, south, west, east, diag;
    int64_t rows, cols; // interior extents
};

Stencil build_stencil(const DarcyProblem& p) {
    const int64_t s1 = p.a.extent(0), s2 = p.a.extent(1);
    const double h1 = 1.0 / static_cast<double>(s1 - 1);
    const double h2 = 1.0 / static_cast<double>(s2 - 1);
    const double inv_h1sq = 1.0 / (h1 * h1), inv_h2sq = 1.0 / (h2 * h2);

    auto face = [&](double lhs, double rhs) {
        if (p.harmonic_faces) return 2.0 * lhs * rhs / (lhs + rhs);
        return 0.5 * (lhs + rhs);
    };

    Stencil st;
    st.rows = s1 - 2;
    st.cols = s2 - 2;
    int64_t m = st.rows * st.cols;
    st.north.resize(static_cast<size_t>(m));
    st.south.resize(static_cast<size_t>(m));
    st.west.resize(static_cast<size_t>(m));
    st.east.resize(static_cast<size_t>(m));
    st.diag.resize(static_cast<size_t>(m));
    for (int64_t i = 1; i <= st.rows; ++i) {
        for (int64_t j = 1; j <= st.cols; ++j) {
            int64_t u = (i - 1) * st.cols + (j - 1);
            double c = p.a.at({i, j});
            double n = face(c, p.a.at({i - 1, j})) * inv_h1sq;
            double sth = face(c, p.a.at({i + 1, j})) * inv_h1sq;
            double w = face(c, p.a.at({i, j - 1})) * inv_h2sq;
            double e = face(c, p.a.at({i, j + 1})) * inv_h2sq;
            st.north[static_cast<size_t>(u)] = n;
            st.south[static_cast<size_t>(u)] = sth;
            st.west[static_cast<size_t>(u)] = w;
            st.east[static_cast<size_t>(u)] = e;
            st.diag[static_cast<size_t>(u)] = n + sth + w + e;
        }
    }
    return st;
}

void apply(const Stencil& st, const std::vector<double>& x, std::vector<double>& y) {
    const int64_t rows = st.rows, cols = st.cols;
    for (int64_t i = 0; i < rows; ++i) {
        for (int64_t j = 0; j < cols; ++j) {
            int64_t u = i * cols + j;
            double acc = st.diag[static_cast<size_t>(u)] * x[static_cast<size_t>(u)];
            if (i > 0) acc -= st.north[static_cast<size_t>(u)] * x[static_cast<size_t>(u - cols)];
            if (i + 1 < rows) acc -= st.south[static_cast<size_t>(u)] * x[static_cast<size_t>(u + cols)];
            if (j > 0) acc -= st.west[static_cast<size_t>(u)] * x[static_cast<size_t>(u - 1)];
            if (j + 1 < cols) acc -= st.east[static_cast<size_t>(u)] * x[static_cast<size_t>(u + 1)];
            y[static_cast<size_t>(u)] = acc;
        }
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace

Field solve_darcy(const DarcyProblem& p) {
    FNO_REQUIRE(p.a.rank() == 2 && p.f.rank() == 2, DataError, "darcy: a and f must be 2-d");
    FNO_REQUIRE(p.a.shape() == p.f.shape(), DataError, "darcy: a and f shapes differ");
    FNO_REQUIRE(p.a.extent(0) >= 3 && p.a.extent(1) >= 3, DataError,
                "darcy: grid must be at least 3x3");
    check_finite(p.f, "darcy forcing");
    for (int64_t i = 0; i < p.a.size(); ++i)
        FNO_REQUIRE(std::isfinite(p.a[i]) && p.a[i] > 0.0, DataError,
                    "darcy: coefficient must be strictly positive and finite");

    Stencil st = build_stencil(p);
    const int64_t m = st.rows * st.cols;
    std::vector<double> b(static_cast<size_t>(m));
    for (int64_t i = 0; i < st.rows; ++i)
        for (int64_t j = 0; j < st.cols; ++j)
            b[static_cast<size_t>(i * st.cols + j)] = p.f.at({i + 1, j + 1});

    const double b_norm = std::sqrt(dot(b, b));
    Field out(p.a.shape(), 0.0);
    if (b_norm == 0.0) return out;

    int64_t max_iter = p.cg_max_iter > 0
                           ? p.cg_max_iter
                           : 40 * std::max(p.a.extent(0), p.a.extent(1)) + 200;

    std::vector<double> x(static_cast<size_t>(m), 0.0), r = b, z(static_cast<size_t>(m)),
        q(static_cast<size_t>(m)), d;
    for (int64_t u = 0; u < m; ++u)
        z[static_cast<size_t>(u)] = r[static_cast<size_t>(u)] / st.diag[static_cast<size_t>(u)];
    d = z;
    double rho = dot(r, z);
    double rel_res = 1.0;
    for (int64_t iter = 0; iter < max_iter; ++iter) {
        apply(st, d, q);
        double alpha = rho / dot(d, q);
        for (int64_t u = 0; u < m; ++u) {
            x[static_cast<size_t>(u)] += alpha * d[static_cast<size_t>(u)];
            r[static_cast<size_t>(u)] -= alpha * q[static_cast<size_t>(u)];
        }
        rel_res = std::sqrt(dot(r, r)) / b_norm;
        if (rel_res <= p.cg_tol) {
            for (int64_t i = 0; i < st.rows; ++i)
                for (int64_t j = 0; j < st.cols; ++j)
                    out.at({i + 1, j + 1}) = x[static_cast<size_t>(i * st.cols + j)];
            return out;
        }
        for (int64_t u = 0; u < m; ++u)
            z[static_cast<size_t>(u)] = r[static_cast<size_t>(u)] / st.diag[static_cast<size_t>(u)];
        double rho_next = dot(r, z);
        double beta = rho_next / rho;
        rho = rho_next;
        for (int64_t u = 0; u < m; ++u)
            d[static_cast<size_t>(u)] = z[static_cast<size_t>(u)] + beta * d[static_cast<size_t>(u)];
    }
    throw NumericError(concat("darcy: CG did not reach tol ", p.cg_tol, " within ", max_iter,
                              " iterations; relative residual = ", rel_res));
}

} // namespace fno
