#include "longmem/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace longmem::optim {

Result brent_min(const std::function<double(double)>& f, double lo, double hi,
                 double tol, std::size_t max_iter) {
    if (!(lo < hi)) throw std::invalid_argument("brent_min: requires lo < hi");
    const double gold = 0.3819660112501051;
    double a = lo, b = hi;
    double x = a + gold * (b - a), w = x, v = x;
    Result res;
    double fx = f(x);
    ++res.evals;
    double fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        const double xm = 0.5 * (a + b);
        const double tol1 = tol * std::abs(x) + 1e-12;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) {
            res.converged = true;
            break;
        }
        bool parabolic = false;
        if (std::abs(e) > tol1) {
            // trial parabolic fit through (v, w, x)
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double etemp = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) &&
                p < q * (b - x)) {
                parabolic = true;
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (xm >= x) ? tol1 : -tol1;
            }
        }
        if (!parabolic) {
            e = (x >= xm) ? a - x : b - x;
            d = gold * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + (d >= 0 ? tol1 : -tol1);
        const double fu = f(u);
        ++res.evals;
        if (fu <= fx) {
            if (u >= x) a = x; else b = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    res.x = {x};
    res.fx = fx;
    return res;
}

Result nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                   std::vector<double> x0, const std::vector<double>& lo,
                   const std::vector<double>& hi, double tol,
                   std::size_t max_iter) {
    const std::size_t n = x0.size();
    if (lo.size() != n || hi.size() != n)
        throw std::invalid_argument("nelder_mead: bound dimension mismatch");

    auto clamp = [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    };
    clamp(x0);

    Result res;
    auto eval = [&](std::vector<double> x) {
        clamp(x);
        ++res.evals;
        return f(x);
    };

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fvals(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        double step = 0.1 * (hi[i] - lo[i]);
        if (x0[i] + step > hi[i]) step = -step;
        simplex[i + 1][i] += step;
        clamp(simplex[i + 1]);
    }
    for (std::size_t i = 0; i <= n; ++i) fvals[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];

        double fspread = std::abs(fvals[worst] - fvals[best]);
        double xspread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            xspread = std::max(xspread, std::abs(simplex[worst][i] - simplex[best][i]));
        if (fspread <= tol * (1.0 + std::abs(fvals[best])) && xspread <= tol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (std::size_t j = 0; j < n; ++j) centroid[j] /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
            clamp(x);
            return x;
        };

        auto reflect = blend(-1.0);
        const double fr = eval(reflect);
        if (fr < fvals[best]) {
            auto expand = blend(-2.0);
            const double fe = eval(expand);
            if (fe < fr) {
                simplex[worst] = std::move(expand);
                fvals[worst] = fe;
            } else {
                simplex[worst] = std::move(reflect);
                fvals[worst] = fr;
            }
        } else if (fr < fvals[second]) {
            simplex[worst] = std::move(reflect);
            fvals[worst] = fr;
        } else {
            auto contract = blend(fr < fvals[worst] ? -0.5 : 0.5);
            const double fc = eval(contract);
            if (fc < std::min(fr, fvals[worst])) {
                simplex[worst] = std::move(contract);
                fvals[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    fvals[i] = eval(simplex[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fvals[i] < fvals[best]) best = i;
    res.x = simplex[best];
    res.fx = fvals[best];
    return res;
}

} // namespace longmem::optim
