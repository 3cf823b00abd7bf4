#include "esta/propagators.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <vector>

namespace esta {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

// FFTW plan creation is not thread-safe; execution on distinct plans is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

// RAII buffer + in-place plans. All stepping happens inside this buffer so
// plans and data stay aligned; states are copied in/out once per run.
class FftwWorkspace {
public:
    FftwWorkspace(int n_fast, int n_slow) : n_(static_cast<size_t>(n_fast) * (n_slow > 0 ? n_slow : 1)) {
        data_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_));
        if (!data_) throw std::bad_alloc();
        std::scoped_lock lock(fftw_mutex());
        if (n_slow > 0) {
            fwd_ = fftw_plan_dft_2d(n_slow, n_fast, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_2d(n_slow, n_fast, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
        } else {
            fwd_ = fftw_plan_dft_1d(n_fast, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_1d(n_fast, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
    }
    ~FftwWorkspace() {
        std::scoped_lock lock(fftw_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(data_);
    }
    FftwWorkspace(const FftwWorkspace&) = delete;
    FftwWorkspace& operator=(const FftwWorkspace&) = delete;

    std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(data_); }
    size_t size() const { return n_; }
    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); } // unnormalized

private:
    size_t n_;
    fftw_complex* data_;
    fftw_plan fwd_, bwd_;
};

} // namespace

// --- grids -------------------------------------------------------------------

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_grid(const Grid1d& g) {
    if (!(g.max > g.min)) throw DomainError("Grid1d: max must exceed min");
    if (!is_power_of_two(g.n)) throw DomainError("Grid1d: point count must be a power of two");
}

Eigen::ArrayXd Grid1d::positions() const {
    Eigen::ArrayXd x(n);
    for (int i = 0; i < n; ++i) x[i] = min + i * dx();
    return x;
}

Eigen::ArrayXd Grid1d::momenta() const {
    Eigen::ArrayXd k(n);
    const double dk = 2.0 * M_PI / (n * dx());
    for (int i = 0; i < n; ++i) {
        const int j = (i <= n / 2 - 1) ? i : i - n;
        k[i] = dk * j;
    }
    return k;
}

// --- wavefunctions --------------------------------------------------------------

double WaveFunction1d::norm() const { return std::sqrt(amp.squaredNorm() * grid.dx()); }
void WaveFunction1d::normalize() { amp /= norm(); }

double WaveFunction2d::norm() const {
    return std::sqrt(amp.squaredNorm() * grid.c.dx() * grid.r.dx());
}
void WaveFunction2d::normalize() { amp /= norm(); }

namespace {
bool same_grid(const Grid1d& a, const Grid1d& b) {
    return a.n == b.n && std::abs(a.min - b.min) < 1e-12 && std::abs(a.max - b.max) < 1e-12;
}
} // namespace

double fidelity(const WaveFunction1d& a, const WaveFunction1d& b) {
    if (!same_grid(a.grid, b.grid)) throw DomainError("fidelity: mismatched grids");
    const std::complex<double> ov = (a.amp.adjoint() * b.amp)(0) * a.grid.dx();
    return std::norm(ov);
}

double fidelity(const WaveFunction2d& a, const WaveFunction2d& b) {
    if (!same_grid(a.grid.c, b.grid.c) || !same_grid(a.grid.r, b.grid.r))
        throw DomainError("fidelity: mismatched grids");
    std::complex<double> ov = 0.0;
    for (int j = 0; j < a.amp.cols(); ++j) ov += (a.amp.col(j).adjoint() * b.amp.col(j))(0);
    ov *= a.grid.c.dx() * a.grid.r.dx();
    return std::norm(ov);
}

double fidelity(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
    return std::norm((a.adjoint() * b)(0));
}

WaveFunction1d translated(const WaveFunction1d& psi, double shift) {
    WaveFunction1d out = psi;
    FftwWorkspace ws(psi.grid.n, 0);
    std::memcpy(ws.data(), psi.amp.data(), sizeof(std::complex<double>) * psi.grid.n);
    ws.forward();
    const Eigen::ArrayXd k = psi.grid.momenta();
    for (int i = 0; i < psi.grid.n; ++i) ws.data()[i] *= std::exp(-kI * k[i] * shift);
    ws.backward();
    for (int i = 0; i < psi.grid.n; ++i) out.amp[i] = ws.data()[i] / double(psi.grid.n);
    return out;
}

WaveFunction2d translated_c(const WaveFunction2d& psi, double shift) {
    WaveFunction2d out = psi;
    const int nc = psi.grid.c.n;
    const Eigen::ArrayXd k = psi.grid.c.momenta();
    Eigen::VectorXcd phase(nc);
    for (int i = 0; i < nc; ++i) phase[i] = std::exp(-kI * k[i] * shift);
    FftwWorkspace ws(nc, 0);
    for (int j = 0; j < psi.amp.cols(); ++j) {
        std::memcpy(ws.data(), psi.amp.col(j).data(), sizeof(std::complex<double>) * nc);
        ws.forward();
        for (int i = 0; i < nc; ++i) ws.data()[i] *= phase[i];
        ws.backward();
        for (int i = 0; i < nc; ++i) out.amp(i, j) = ws.data()[i] / double(nc);
    }
    return out;
}

double energy_1d(const WaveFunction1d& psi, const std::function<double(double)>& V, double mass) {
    const int n = psi.grid.n;
    FftwWorkspace ws(n, 0);
    std::memcpy(ws.data(), psi.amp.data(), sizeof(std::complex<double>) * n);
    ws.forward();
    const Eigen::ArrayXd k = psi.grid.momenta();
    double kin = 0.0, ksum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p2 = std::norm(ws.data()[i]);
        kin += p2 * k[i] * k[i] / (2.0 * mass);
        ksum += p2;
    }
    kin /= ksum;
    double pot = 0.0, xsum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p2 = std::norm(psi.amp[i]);
        pot += p2 * V(psi.grid.x(i));
        xsum += p2;
    }
    pot /= xsum;
    return kin + pot;
}

WaveFunction1d oscillator_ground_state(const Grid1d& grid, double mass, double omega,
                                       double center) {
    validate_grid(grid);
    if (!(mass > 0.0) || !(omega > 0.0))
        throw DomainError("oscillator_ground_state: mass and omega must be positive");
    WaveFunction1d psi;
    psi.grid = grid;
    psi.amp.resize(grid.n);
    const double s2 = mass * omega;
    for (int i = 0; i < grid.n; ++i) {
        const double u = grid.x(i) - center;
        psi.amp[i] = std::pow(s2 / M_PI, 0.25) * std::exp(-0.5 * s2 * u * u);
    }
    psi.normalize();
    return psi;
}

// --- potentials -------------------------------------------------------------------

TimePotential1d pointwise_potential(std::function<double(double, double)> f) {
    return [f = std::move(f)](double t, const Eigen::ArrayXd& x, Eigen::ArrayXd& out) {
        out.resize(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = f(x[i], t);
    };
}

void Potential2d::fill_exp(double t, std::complex<double> factor, const Grid2d& grid,
                           Eigen::MatrixXcd& out) const {
    out.resize(grid.c.n, grid.r.n);
    for (int j = 0; j < grid.r.n; ++j) {
        const double xr = grid.r.x(j);
        for (int i = 0; i < grid.c.n; ++i)
            out(i, j) = std::exp(factor * value(grid.c.x(i), xr, t));
    }
}

// --- split-step, 1D -----------------------------------------------------------------

namespace {

// Momentum-edge population: total weight in the outer 1/16 band of k bins.
double edge_fraction_1d(const std::complex<double>* kdata, int n) {
    double edge = 0.0, total = 0.0;
    const int band = std::max(1, n / 16);
    // FFT ordering: highest |k| sits around index n/2.
    const int lo = n / 2 - band / 2;
    for (int i = 0; i < n; ++i) {
        const double w = std::norm(kdata[i]);
        total += w;
        if (i >= lo && i < lo + band) edge += w;
    }
    return total > 0.0 ? edge / total : 0.0;
}

double edge_fraction_2d(const std::complex<double>* kdata, int nc, int nr) {
    double edge = 0.0, total = 0.0;
    const int band_c = std::max(1, nc / 16);
    const int lo_c = nc / 2 - band_c / 2;
    const int band_r = std::max(1, nr / 16);
    const int lo_r = nr / 2 - band_r / 2;
    for (int j = 0; j < nr; ++j) {
        const bool r_edge = (j >= lo_r && j < lo_r + band_r);
        for (int i = 0; i < nc; ++i) {
            const double w = std::norm(kdata[static_cast<size_t>(j) * nc + i]);
            total += w;
            if (r_edge || (i >= lo_c && i < lo_c + band_c)) edge += w;
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

} // namespace

void split_step_1d(WaveFunction1d& psi, const TimePotential1d& V, double mass, double t_target,
                   int n_steps, const SplitOptions& opts) {
    validate_grid(psi.grid);
    if (n_steps < 1) throw DomainError("split_step_1d: n_steps must be positive");
    const int n = psi.grid.n;
    const double dt = (t_target - psi.time) / n_steps;
    const double norm0 = psi.norm();

    FftwWorkspace ws(n, 0);
    std::memcpy(ws.data(), psi.amp.data(), sizeof(std::complex<double>) * n);

    const Eigen::ArrayXd x = psi.grid.positions();
    const Eigen::ArrayXd k = psi.grid.momenta();
    Eigen::VectorXcd kin_phase(n);
    for (int i = 0; i < n; ++i)
        kin_phase[i] = std::exp(-kI * dt * k[i] * k[i] / (2.0 * mass)) / double(n);

    Eigen::ArrayXd vals(n), cosv(n), sinv(n);
    Eigen::VectorXcd half(n);
    for (int s = 0; s < n_steps; ++s) {
        const double t_mid = psi.time + (s + 0.5) * dt;
        V(t_mid, x, vals);
        cosv = (-0.5 * dt * vals).cos();
        sinv = (-0.5 * dt * vals).sin();
        for (int i = 0; i < n; ++i) half[i] = std::complex<double>(cosv[i], sinv[i]);
        std::complex<double>* a = ws.data();
        for (int i = 0; i < n; ++i) a[i] *= half[i];
        ws.forward();
        const bool check = opts.aliasing_stride > 0 &&
                           (s % opts.aliasing_stride == 0 || s == n_steps - 1);
        if (check && edge_fraction_1d(ws.data(), n) > opts.aliasing_tol)
            throw GridError("split_step_1d: momentum-edge population exceeds tolerance");
        for (int i = 0; i < n; ++i) a[i] *= kin_phase[i];
        ws.backward();
        for (int i = 0; i < n; ++i) a[i] *= half[i];
    }

    std::memcpy(psi.amp.data(), ws.data(), sizeof(std::complex<double>) * n);
    psi.time = t_target;
    if (std::abs(psi.norm() - norm0) > opts.norm_tol)
        throw AccuracyError("split_step_1d: norm drift exceeds tolerance");
}

void split_step_2d(WaveFunction2d& psi, const Potential2d& V, double mass, double t_target,
                   int n_steps, const SplitOptions& opts) {
    validate_grid(psi.grid.c);
    validate_grid(psi.grid.r);
    if (n_steps < 1) throw DomainError("split_step_2d: n_steps must be positive");
    const int nc = psi.grid.c.n, nr = psi.grid.r.n;
    const size_t total = static_cast<size_t>(nc) * nr;
    const double dt = (t_target - psi.time) / n_steps;
    const double norm0 = psi.norm();

    FftwWorkspace ws(nc, nr);
    std::memcpy(ws.data(), psi.amp.data(), sizeof(std::complex<double>) * total);

    const Eigen::ArrayXd kc = psi.grid.c.momenta();
    const Eigen::ArrayXd kr = psi.grid.r.momenta();
    Eigen::MatrixXcd kin_phase(nc, nr);
    for (int j = 0; j < nr; ++j)
        for (int i = 0; i < nc; ++i)
            kin_phase(i, j) =
                std::exp(-kI * dt * (kc[i] * kc[i] + kr[j] * kr[j]) / (2.0 * mass)) /
                double(total);

    Eigen::MatrixXcd half;
    for (int s = 0; s < n_steps; ++s) {
        const double t_mid = psi.time + (s + 0.5) * dt;
        V.fill_exp(t_mid, -kI * (0.5 * dt), psi.grid, half);
        std::complex<double>* a = ws.data();
        const std::complex<double>* h = half.data();
        for (size_t i = 0; i < total; ++i) a[i] *= h[i];
        ws.forward();
        const bool check = opts.aliasing_stride > 0 &&
                           (s % opts.aliasing_stride == 0 || s == n_steps - 1);
        if (check && edge_fraction_2d(ws.data(), nc, nr) > opts.aliasing_tol)
            throw GridError("split_step_2d: momentum-edge population exceeds tolerance");
        const std::complex<double>* kp = kin_phase.data();
        for (size_t i = 0; i < total; ++i) a[i] *= kp[i];
        ws.backward();
        for (size_t i = 0; i < total; ++i) a[i] *= h[i];
    }

    std::memcpy(psi.amp.data(), ws.data(), sizeof(std::complex<double>) * total);
    psi.time = t_target;
    if (std::abs(psi.norm() - norm0) > opts.norm_tol)
        throw AccuracyError("split_step_2d: norm drift exceeds tolerance");
}

// --- imaginary time ------------------------------------------------------------------

namespace {

struct RayleighTracker {
    double prev = std::numeric_limits<double>::quiet_NaN();
    bool stationary(double e, double tol) {
        const bool ok = std::isfinite(prev) && std::abs(e - prev) <= tol * std::max(1.0, std::abs(e));
        prev = e;
        return ok;
    }
};

} // namespace

WaveFunction1d ground_state_1d(const std::function<double(double)>& V, double mass,
                               const Grid1d& grid, double guess_center, double guess_width,
                               const GroundStateOptions& opts) {
    validate_grid(grid);
    const int n = grid.n;
    WaveFunction1d psi;
    psi.grid = grid;
    psi.amp.resize(n);
    for (int i = 0; i < n; ++i) {
        const double u = (grid.x(i) - guess_center) / guess_width;
        psi.amp[i] = std::exp(-0.5 * u * u);
    }
    psi.normalize();

    const Eigen::ArrayXd x = grid.positions();
    const Eigen::ArrayXd k = grid.momenta();
    Eigen::ArrayXd vx(n);
    for (int i = 0; i < n; ++i) vx[i] = V(x[i]);
    const double vmin = vx.minCoeff();

    FftwWorkspace ws(n, 0);
    std::memcpy(ws.data(), psi.amp.data(), sizeof(std::complex<double>) * n);

    // Rayleigh quotient computed in a dedicated workspace so the plan is
    // created once per solve rather than per iteration.
    FftwWorkspace ws_energy(n, 0);
    auto energy_now = [&]() {
        std::memcpy(ws_energy.data(), ws.data(), sizeof(std::complex<double>) * n);
        ws_energy.forward();
        double kin = 0.0, ksum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = std::norm(ws_energy.data()[i]);
            kin += w * k[i] * k[i] / (2.0 * mass);
            ksum += w;
        }
        kin /= ksum;
        double pot = 0.0, xsum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = std::norm(ws.data()[i]);
            pot += w * vx[i];
            xsum += w;
        }
        pot /= xsum;
        return kin + pot;
    };

    for (double dtau = opts.dtau_start;;
         dtau = std::max(dtau * opts.dtau_shrink, opts.dtau_min)) {
        // exp(-dtau (V - vmin)/2) and exp(-dtau k^2 / 2m); the vmin offset only
        // rescales the norm, which is divided out anyway.
        Eigen::ArrayXd half(n), kin(n);
        for (int i = 0; i < n; ++i) half[i] = std::exp(-0.5 * dtau * (vx[i] - vmin));
        for (int i = 0; i < n; ++i) kin[i] = std::exp(-dtau * k[i] * k[i] / (2.0 * mass)) / n;

        // The energy moves by ~4 dtau * residual per iteration near
        // convergence, so the stage tolerance must shrink with dtau for the
        // final residual to reach the requested stationarity level.
        const double stage_tol = std::max(1e-13, 40.0 * dtau * opts.energy_tol);
        RayleighTracker tracker;
        bool stage_done = false;
        for (int it = 0; it < opts.max_iters_per_stage; ++it) {
            std::complex<double>* a = ws.data();
            double nrm = 0.0;
            for (int i = 0; i < n; ++i) a[i] *= half[i];
            ws.forward();
            for (int i = 0; i < n; ++i) a[i] *= kin[i];
            ws.backward();
            for (int i = 0; i < n; ++i) {
                a[i] *= half[i];
                nrm += std::norm(a[i]);
            }
            nrm = std::sqrt(nrm * grid.dx());
            for (int i = 0; i < n; ++i) a[i] /= nrm;
            if ((it + 1) % opts.energy_stride == 0 &&
                tracker.stationary(energy_now(), stage_tol)) {
                stage_done = true;
                break;
            }
        }
        if (!stage_done)
            throw ConvergenceError("ground_state_1d: Rayleigh quotient not stationary");
        if (dtau <= opts.dtau_min * (1.0 + 1e-12)) break;
    }

    std::memcpy(psi.amp.data(), ws.data(), sizeof(std::complex<double>) * n);
    psi.normalize();
    psi.time = 0.0;
    return psi;
}

WaveFunction2d ground_state_2d(const Potential2d& V, double mass, const Grid2d& grid,
                               double guess_center_c, double guess_center_r, double guess_width,
                               const GroundStateOptions& opts) {
    validate_grid(grid.c);
    validate_grid(grid.r);
    const int nc = grid.c.n, nr = grid.r.n;
    const size_t total = static_cast<size_t>(nc) * nr;

    WaveFunction2d psi;
    psi.grid = grid;
    psi.amp.resize(nc, nr);
    for (int j = 0; j < nr; ++j) {
        const double ur = (grid.r.x(j) - guess_center_r) / guess_width;
        for (int i = 0; i < nc; ++i) {
            const double uc = (grid.c.x(i) - guess_center_c) / guess_width;
            psi.amp(i, j) = std::exp(-0.5 * (uc * uc + ur * ur));
        }
    }
    psi.normalize();

    const Eigen::ArrayXd kc = grid.c.momenta();
    const Eigen::ArrayXd kr = grid.r.momenta();
    Eigen::MatrixXcd vexp;

    FftwWorkspace ws(nc, nr);
    std::memcpy(ws.data(), psi.amp.data(), sizeof(std::complex<double>) * total);

    // Static potential values for the Rayleigh quotient, filled once.
    Eigen::ArrayXXd vgrid(nc, nr);
    for (int j = 0; j < nr; ++j)
        for (int i = 0; i < nc; ++i) vgrid(i, j) = V.value(grid.c.x(i), grid.r.x(j), 0.0);

    FftwWorkspace ws_energy(nc, nr);
    auto energy_now = [&]() {
        std::memcpy(ws_energy.data(), ws.data(), sizeof(std::complex<double>) * total);
        ws_energy.forward();
        double kin = 0.0, ksum = 0.0;
        for (int j = 0; j < nr; ++j)
            for (int i = 0; i < nc; ++i) {
                const double w = std::norm(ws_energy.data()[static_cast<size_t>(j) * nc + i]);
                kin += w * (kc[i] * kc[i] + kr[j] * kr[j]) / (2.0 * mass);
                ksum += w;
            }
        kin /= ksum;
        double pot = 0.0, xsum = 0.0;
        for (int j = 0; j < nr; ++j)
            for (int i = 0; i < nc; ++i) {
                const double w = std::norm(ws.data()[static_cast<size_t>(j) * nc + i]);
                pot += w * vgrid(i, j);
                xsum += w;
            }
        pot /= xsum;
        return kin + pot;
    };

    for (double dtau = opts.dtau_start;;
         dtau = std::max(dtau * opts.dtau_shrink, opts.dtau_min)) {
        V.fill_exp(0.0, std::complex<double>(-0.5 * dtau, 0.0), grid, vexp);
        // Remove the overall scale so repeated multiplication stays in range.
        const double vmax_mag = vexp.cwiseAbs().maxCoeff();
        vexp /= vmax_mag;
        Eigen::MatrixXcd kin(nc, nr);
        for (int j = 0; j < nr; ++j)
            for (int i = 0; i < nc; ++i)
                kin(i, j) = std::exp(-dtau * (kc[i] * kc[i] + kr[j] * kr[j]) / (2.0 * mass)) /
                            double(total);

        const double stage_tol = std::max(1e-13, 40.0 * dtau * opts.energy_tol);
        RayleighTracker tracker;
        bool stage_done = false;
        const int stride = std::max(opts.energy_stride, 2);
        for (int it = 0; it < opts.max_iters_per_stage; ++it) {
            std::complex<double>* a = ws.data();
            const std::complex<double>* h = vexp.data();
            const std::complex<double>* kp = kin.data();
            double nrm = 0.0;
            for (size_t i = 0; i < total; ++i) a[i] *= h[i];
            ws.forward();
            for (size_t i = 0; i < total; ++i) a[i] *= kp[i];
            ws.backward();
            for (size_t i = 0; i < total; ++i) {
                a[i] *= h[i];
                nrm += std::norm(a[i]);
            }
            nrm = std::sqrt(nrm * grid.c.dx() * grid.r.dx());
            for (size_t i = 0; i < total; ++i) a[i] /= nrm;
            if ((it + 1) % stride == 0 && tracker.stationary(energy_now(), stage_tol)) {
                stage_done = true;
                break;
            }
        }
        if (!stage_done)
            throw ConvergenceError("ground_state_2d: Rayleigh quotient not stationary");
        if (dtau <= opts.dtau_min * (1.0 + 1e-12)) break;
    }

    std::memcpy(psi.amp.data(), ws.data(), sizeof(std::complex<double>) * total);
    psi.normalize();
    psi.time = 0.0;
    return psi;
}

// --- two-level ---------------------------------------------------------------------------

namespace {

// exp(M) for 2x2 complex M via the traceless decomposition.
Eigen::Matrix2cd exp_2x2(const Eigen::Matrix2cd& m) {
    const std::complex<double> tr_half = 0.5 * (m(0, 0) + m(1, 1));
    Eigen::Matrix2cd b = m;
    b(0, 0) -= tr_half;
    b(1, 1) -= tr_half;
    const std::complex<double> r2 = b(0, 0) * b(0, 0) + b(0, 1) * b(1, 0);
    const std::complex<double> r = std::sqrt(r2);
    std::complex<double> ch, sh_over_r;
    if (std::abs(r) < 1e-6) {
        ch = 1.0 + r2 / 2.0 + r2 * r2 / 24.0;
        sh_over_r = 1.0 + r2 / 6.0 + r2 * r2 / 120.0;
    } else {
        ch = std::cosh(r);
        sh_over_r = std::sinh(r) / r;
    }
    Eigen::Matrix2cd out = ch * Eigen::Matrix2cd::Identity() + sh_over_r * b;
    return std::exp(tr_half) * out;
}

} // namespace

Eigen::Matrix2cd propagate_two_level_matrix(const std::function<Eigen::Matrix2cd(double)>& H,
                                            const Eigen::Matrix2cd& u0, double t0, double t1,
                                            double max_step) {
    if (t1 < t0) throw DomainError("propagate_two_level_matrix: t1 < t0");
    if (t1 == t0) return u0;
    if (!(max_step > 0.0)) throw DomainError("propagate_two_level_matrix: bad step size");
    const int n_steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / max_step)));
    const double h = (t1 - t0) / n_steps;
    const double c = std::sqrt(3.0) / 6.0;

    Eigen::Matrix2cd u = u0;
    for (int s = 0; s < n_steps; ++s) {
        const double t = t0 + s * h;
        const Eigen::Matrix2cd a1 = -kI * H(t + (0.5 - c) * h);
        const Eigen::Matrix2cd a2 = -kI * H(t + (0.5 + c) * h);
        const Eigen::Matrix2cd omega =
            0.5 * h * (a1 + a2) + (std::sqrt(3.0) / 12.0) * h * h * (a2 * a1 - a1 * a2);
        u = exp_2x2(omega) * u;
    }
    return u;
}

Eigen::Vector2cd propagate_two_level(const std::function<Eigen::Matrix2cd(double)>& H,
                                     const Eigen::Vector2cd& psi0, double t_f,
                                     const StepControl& ctrl) {
    const double step = ctrl.max_step > 0.0 ? ctrl.max_step : t_f / 4096.0;
    const Eigen::Matrix2cd u =
        propagate_two_level_matrix(H, Eigen::Matrix2cd::Identity(), 0.0, t_f, step);
    Eigen::Vector2cd psi = u * psi0;
    if (ctrl.verify) {
        const Eigen::Matrix2cd u2 =
            propagate_two_level_matrix(H, Eigen::Matrix2cd::Identity(), 0.0, t_f, step / 2.0);
        if ((u2 * psi0 - psi).norm() > ctrl.verify_tol)
            throw AccuracyError("propagate_two_level: step-halving discrepancy above tolerance");
        psi = u2 * psi0;
    }
    return psi;
}

// --- checkpoints ------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'E', 'S', 'T', 'A', 'W', 'F', 'N', '1'};

void write_header(std::ofstream& out, const std::vector<Grid1d>& axes, double time) {
    out.write(kMagic, sizeof(kMagic));
    const uint32_t ndim = static_cast<uint32_t>(axes.size());
    out.write(reinterpret_cast<const char*>(&ndim), sizeof(ndim));
    for (const Grid1d& g : axes) {
        const uint64_t n = static_cast<uint64_t>(g.n);
        out.write(reinterpret_cast<const char*>(&n), sizeof(n));
        out.write(reinterpret_cast<const char*>(&g.min), sizeof(double));
        out.write(reinterpret_cast<const char*>(&g.max), sizeof(double));
    }
    out.write(reinterpret_cast<const char*>(&time), sizeof(double));
}

std::vector<Grid1d> read_header(std::ifstream& in, double& time, uint32_t expected_dim) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DomainError("wavefunction checkpoint: bad magic");
    uint32_t ndim = 0;
    in.read(reinterpret_cast<char*>(&ndim), sizeof(ndim));
    if (ndim != expected_dim) throw DomainError("wavefunction checkpoint: dimension mismatch");
    std::vector<Grid1d> axes(ndim);
    for (Grid1d& g : axes) {
        uint64_t n = 0;
        in.read(reinterpret_cast<char*>(&n), sizeof(n));
        in.read(reinterpret_cast<char*>(&g.min), sizeof(double));
        in.read(reinterpret_cast<char*>(&g.max), sizeof(double));
        g.n = static_cast<int>(n);
    }
    in.read(reinterpret_cast<char*>(&time), sizeof(double));
    if (!in) throw DomainError("wavefunction checkpoint: truncated header");
    return axes;
}

} // namespace

void write_wavefunction(const std::string& path, const WaveFunction1d& psi) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("write_wavefunction: cannot open " + path);
    write_header(out, {psi.grid}, psi.time);
    out.write(reinterpret_cast<const char*>(psi.amp.data()),
              sizeof(std::complex<double>) * psi.grid.n);
    if (!out) throw DomainError("write_wavefunction: write failed for " + path);
}

void write_wavefunction(const std::string& path, const WaveFunction2d& psi) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("write_wavefunction: cannot open " + path);
    write_header(out, {psi.grid.c, psi.grid.r}, psi.time);
    out.write(reinterpret_cast<const char*>(psi.amp.data()),
              sizeof(std::complex<double>) * psi.amp.size());
    if (!out) throw DomainError("write_wavefunction: write failed for " + path);
}

WaveFunction1d read_wavefunction_1d(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("read_wavefunction_1d: cannot open " + path);
    WaveFunction1d psi;
    const auto axes = read_header(in, psi.time, 1);
    psi.grid = axes[0];
    psi.amp.resize(psi.grid.n);
    in.read(reinterpret_cast<char*>(psi.amp.data()), sizeof(std::complex<double>) * psi.grid.n);
    if (!in) throw DomainError("read_wavefunction_1d: truncated data");
    return psi;
}

WaveFunction2d read_wavefunction_2d(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("read_wavefunction_2d: cannot open " + path);
    WaveFunction2d psi;
    const auto axes = read_header(in, psi.time, 2);
    psi.grid.c = axes[0];
    psi.grid.r = axes[1];
    psi.amp.resize(psi.grid.c.n, psi.grid.r.n);
    in.read(reinterpret_cast<char*>(psi.amp.data()),
            sizeof(std::complex<double>) * psi.amp.size());
    if (!in) throw DomainError("read_wavefunction_2d: truncated data");
    return psi;
}

} // namespace esta
