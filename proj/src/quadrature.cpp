#include "singbif/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace singbif {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule, abscissae >= 0.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value, error;
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    double resg = 0.0, resk = 0.0;
    // center point
    const double fc = f(c);
    resg += kWg[3] * fc;
    resk += kWgk[7] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = hl * kXgk[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = resk * hl;
    const double diff = (resk - resg) * hl;
    p.error = std::pow(200.0 * std::fabs(diff), 1.5);
    p.error = std::min(std::fabs(diff), p.error);
    if (p.error == 0.0) p.error = std::fabs(diff);
    return p;
}

}  // namespace

double gk15_panel(const std::function<double(double)>& f, double a, double b) {
    return eval_panel(f, a, b).value;
}

QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_tol, int max_depth) {
    if (!(a <= b)) std::swap(a, b);
    QuadResult out;
    if (a == b) return out;

    struct Node {
        Panel p;
        int depth;
    };
    std::vector<Node> heap;
    heap.push_back({eval_panel(f, a, b), 0});
    double total = heap[0].p.value;
    double toterr = heap[0].p.error;
    int panels = 1;

    auto worst_first = [](const Node& x, const Node& y) { return x.p.error < y.p.error; };
    std::make_heap(heap.begin(), heap.end(), worst_first);

    while (toterr > std::max(abs_tol, rel_tol * std::fabs(total)) && panels < 20000) {
        std::pop_heap(heap.begin(), heap.end(), worst_first);
        Node cur = heap.back();
        heap.pop_back();
        if (cur.depth >= max_depth) {
            // cannot refine further; keep its contribution and stop splitting it
            heap.insert(heap.begin(), cur);  // park at front, out of heap order
            break;
        }
        const double mid = 0.5 * (cur.p.a + cur.p.b);
        Panel left = eval_panel(f, cur.p.a, mid);
        Panel right = eval_panel(f, mid, cur.p.b);
        total += left.value + right.value - cur.p.value;
        toterr += left.error + right.error - cur.p.error;
        heap.push_back({left, cur.depth + 1});
        std::push_heap(heap.begin(), heap.end(), worst_first);
        heap.push_back({right, cur.depth + 1});
        std::push_heap(heap.begin(), heap.end(), worst_first);
        ++panels;
    }

    // recompute sums to avoid drift from incremental updates
    total = 0.0;
    toterr = 0.0;
    for (const auto& n : heap) {
        total += n.p.value;
        toterr += n.p.error;
    }
    out.value = total;
    out.error = toterr;
    out.panels = panels;
    return out;
}

}  // namespace singbif
