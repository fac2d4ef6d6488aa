#include "singbif/util.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace singbif {

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("kendall_tau: need two series of equal length >= 2");
    const std::size_t n = a.size();
    long long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double da = a[j] - a[i];
            const double db = b[j] - b[i];
            const double s = da * db;
            if (s > 0) ++concordant;
            else if (s < 0) ++discordant;
            // ties count in the denominator (tau-a)
        }
    }
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return static_cast<double>(concordant - discordant) / pairs;
}

int worker_cap() {
    if (const char* env = std::getenv("SINGBIF_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers =
        std::min<std::size_t>(n, static_cast<std::size_t>(worker_cap()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 2) return {a};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

double richardson_extrapolate(const std::vector<double>& values, double q) {
    if (values.empty()) throw std::invalid_argument("richardson: empty sequence");
    std::vector<double> r = values;
    const std::size_t n = r.size();
    for (std::size_t m = 1; m < n; ++m) {
        const double qm = std::pow(q, static_cast<double>(m));
        for (std::size_t j = 0; j + m < n; ++j)
            r[j] = (r[j + 1] - qm * r[j]) / (1.0 - qm);
    }
    return r[0];
}

std::vector<double> polyfit(const std::vector<double>& x,
                            const std::vector<double>& y, int degree) {
    if (x.size() != y.size() || static_cast<int>(x.size()) < degree + 1)
        throw std::invalid_argument("polyfit: not enough points");
    const int m = degree + 1;
    // normal equations, small m only
    std::vector<double> ata(static_cast<std::size_t>(m * m), 0.0);
    std::vector<double> atb(static_cast<std::size_t>(m), 0.0);
    for (std::size_t s = 0; s < x.size(); ++s) {
        double pi = 1.0;
        std::vector<double> pw(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) { pw[static_cast<std::size_t>(i)] = pi; pi *= x[s]; }
        for (int i = 0; i < m; ++i) {
            atb[static_cast<std::size_t>(i)] += pw[static_cast<std::size_t>(i)] * y[s];
            for (int j = 0; j < m; ++j)
                ata[static_cast<std::size_t>(i * m + j)] +=
                    pw[static_cast<std::size_t>(i)] * pw[static_cast<std::size_t>(j)];
        }
    }
    // Gaussian elimination with partial pivoting
    std::vector<double> c = atb;
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::fabs(ata[static_cast<std::size_t>(r * m + col)]) >
                std::fabs(ata[static_cast<std::size_t>(piv * m + col)]))
                piv = r;
        if (piv != col) {
            for (int j = 0; j < m; ++j)
                std::swap(ata[static_cast<std::size_t>(col * m + j)],
                          ata[static_cast<std::size_t>(piv * m + j)]);
            std::swap(c[static_cast<std::size_t>(col)], c[static_cast<std::size_t>(piv)]);
        }
        const double d = ata[static_cast<std::size_t>(col * m + col)];
        if (d == 0.0) throw std::runtime_error("polyfit: singular system");
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = ata[static_cast<std::size_t>(r * m + col)] / d;
            for (int j = 0; j < m; ++j)
                ata[static_cast<std::size_t>(r * m + j)] -=
                    f * ata[static_cast<std::size_t>(col * m + j)];
            c[static_cast<std::size_t>(r)] -= f * c[static_cast<std::size_t>(col)];
        }
    }
    for (int i = 0; i < m; ++i)
        c[static_cast<std::size_t>(i)] /= ata[static_cast<std::size_t>(i * m + i)];
    return c;
}

}  // namespace singbif
