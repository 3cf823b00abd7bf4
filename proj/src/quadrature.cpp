#include "esta/quadrature.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>

#include "esta/errors.hpp"

namespace esta {

namespace {

QuadratureRule golub_welsch(int n, const std::function<double(int)>& offdiag, double mu0) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = offdiag(k);
        jacobi(k - 1, k) = b;
        jacobi(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    QuadratureRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

// Rules are cached; node generation costs an n x n eigensolve.
const QuadratureRule& cached_rule(std::map<int, QuadratureRule>& cache, std::mutex& mtx, int n,
                                  const std::function<double(int)>& offdiag, double mu0) {
    if (n < 1) throw DomainError("quadrature: node count must be positive");
    std::scoped_lock lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, golub_welsch(n, offdiag, mu0)).first;
    return it->second;
}

} // namespace

const QuadratureRule& gauss_legendre(int n) {
    static std::map<int, QuadratureRule> cache;
    static std::mutex mtx;
    return cached_rule(cache, mtx, n,
                       [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0);
}

const QuadratureRule& gauss_hermite(int n) {
    static std::map<int, QuadratureRule> cache;
    static std::mutex mtx;
    return cached_rule(cache, mtx, n,
                       [](int k) { return std::sqrt(0.5 * k); }, std::sqrt(M_PI));
}

CompositeRule composite_gauss_legendre(double a, double b, int panels, int points) {
    if (panels < 1) throw DomainError("composite_gauss_legendre: panels must be positive");
    const QuadratureRule& gl = gauss_legendre(points);
    CompositeRule out;
    out.nodes.reserve(static_cast<size_t>(panels) * points);
    out.weights.reserve(static_cast<size_t>(panels) * points);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int i = 0; i < points; ++i) {
            out.nodes.push_back(mid + 0.5 * h * gl.nodes[i]);
            out.weights.push_back(0.5 * h * gl.weights[i]);
        }
    }
    return out;
}

double hermite_normalized(int n, double y) {
    if (n < 0) throw DomainError("hermite_normalized: negative index");
    const double h0 = std::pow(M_PI, -0.25);
    if (n == 0) return h0;
    double prev = h0;
    double cur = std::sqrt(2.0) * y * h0;
    for (int k = 1; k < n; ++k) {
        const double next =
            std::sqrt(2.0 / (k + 1.0)) * y * cur - std::sqrt(k / (k + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

} // namespace esta
