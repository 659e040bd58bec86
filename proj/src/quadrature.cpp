#include "fracevo/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace fracevo::quad {

namespace {

constexpr double kPi = 3.14159265358979323846;

Rule build_gauss_legendre(std::size_t n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = x;
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = p2;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

// Kronrod 15 / Gauss 7 abscissae and weights (QUADPACK qk15).
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a, b;
    Vec value;
    double error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

Interval kronrod15(const std::function<Vec(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const Vec fc = f(c);
    Vec k = fc * kWgk[7];
    Vec g = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const Vec f1 = f(c - dx), f2 = f(c + dx);
        k += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) g += kWg[j / 2] * (f1 + f2);
    }
    Interval iv{a, b, k * h, 0.0};
    iv.error = ((k - g) * h).norm();
    return iv;
}

} // namespace

const Rule& gauss_legendre(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

Vec composite(const std::function<Vec(double)>& f, double a, double b, std::size_t panels, std::size_t order) {
    const Rule& rule = gauss_legendre(order);
    const double h = (b - a) / static_cast<double>(panels);
    Vec acc;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double c = lo + 0.5 * h;
        Vec panel;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            Vec v = f(c + 0.5 * h * rule.nodes[i]) * rule.weights[i];
            if (panel.size() == 0)
                panel = std::move(v);
            else
                panel += v;
        }
        panel *= 0.5 * h;
        if (acc.size() == 0)
            acc = std::move(panel);
        else
            acc += panel;
    }
    return acc;
}

cplx composite_scalar(const std::function<cplx(double)>& f, double a, double b, std::size_t panels,
                      std::size_t order) {
    const Vec v = composite(
        [&](double x) {
            Vec r(1);
            r(0) = f(x);
            return r;
        },
        a, b, panels, order);
    return v(0);
}

AdaptiveResult gauss_kronrod(const std::function<Vec(double)>& f, double a, double b, double abs_tol,
                             double rel_tol, std::size_t max_intervals) {
    AdaptiveResult out;
    std::priority_queue<Interval> heap;
    heap.push(kronrod15(f, a, b));
    out.evaluations = 15;
    Vec total = heap.top().value;
    double err = heap.top().error;
    while (err > std::max(abs_tol, rel_tol * total.norm())) {
        if (heap.size() >= max_intervals) {
            out.converged = false;
            break;
        }
        Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Interval l = kronrod15(f, worst.a, mid), r = kronrod15(f, mid, worst.b);
        out.evaluations += 30;
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(std::move(l));
        heap.push(std::move(r));
    }
    // re-sum in a fixed order to avoid drift from the running updates
    std::vector<Interval> all;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    out.value = Vec::Zero(total.size());
    out.error = 0.0;
    for (const auto& iv : all) {
        out.value += iv.value;
        out.error += iv.error;
    }
    return out;
}

} // namespace fracevo::quad
