#include "gw/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "gw/errors.hpp"

namespace gw::kernels {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void rot(double* x, double* y, double c, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

void abs_diff(double a, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::abs(a - y[i]);
}

void sq_diff(double a, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a - y[i];
        out[i] = d * d;
    }
}

void scale(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

} // namespace scalar

namespace {

struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*rot)(double*, double*, double, double, std::size_t);
    void (*abs_diff)(double, const double*, double*, std::size_t);
    void (*sq_diff)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    double (*sum)(const double*, std::size_t);
};

constexpr Table kScalarTable{scalar::dot, scalar::axpy, scalar::rot,
                             scalar::abs_diff, scalar::sq_diff, scalar::scale, scalar::sum};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2Table{avx2::dot, avx2::axpy, avx2::rot,
                           avx2::abs_diff, avx2::sq_diff, avx2::scale, avx2::sum};
constexpr Table kAvx512Table{avx512::dot, avx512::axpy, avx512::rot,
                             avx512::abs_diff, avx512::sq_diff, avx512::scale, avx512::sum};

bool cpu_has(Backend b) {
    switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    case Backend::avx512: return __builtin_cpu_supports("avx512f");
    }
    return false;
}
#else
bool cpu_has(Backend b) { return b == Backend::scalar; }
#endif

Backend detect() {
    if (const char* env = std::getenv("GW_KERNEL_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has(Backend::avx2)) return Backend::avx2;
        if (std::strcmp(env, "avx512") == 0 && cpu_has(Backend::avx512)) return Backend::avx512;
    }
    if (cpu_has(Backend::avx512)) return Backend::avx512;
    if (cpu_has(Backend::avx2)) return Backend::avx2;
    return Backend::scalar;
}

const Table& table_for(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
    switch (b) {
    case Backend::avx512: return kAvx512Table;
    case Backend::avx2: return kAvx2Table;
    default: return kScalarTable;
    }
#else
    (void)b;
    return kScalarTable;
#endif
}

std::atomic<const Table*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const Table& active_table() {
    const Table* t = g_table.load(std::memory_order_acquire);
    if (!t) {
        Backend b = detect();
        g_backend.store(b, std::memory_order_relaxed);
        t = &table_for(b);
        g_table.store(t, std::memory_order_release);
    }
    return *t;
}

} // namespace

Backend active() {
    active_table();
    return g_backend.load(std::memory_order_relaxed);
}

bool supported(Backend b) { return cpu_has(b); }

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::avx512: return "avx512";
    }
    return "unknown";
}

void force_backend(Backend b) {
    if (!cpu_has(b)) fail(errc::invalid_size, std::string("kernel backend not supported on this CPU: ") + backend_name(b));
    g_backend.store(b, std::memory_order_relaxed);
    g_table.store(&table_for(b), std::memory_order_release);
}

void reset_backend() {
    Backend b = detect();
    g_backend.store(b, std::memory_order_relaxed);
    g_table.store(&table_for(b), std::memory_order_release);
}

double dot(const double* x, const double* y, std::size_t n) { return active_table().dot(x, y, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { active_table().axpy(a, x, y, n); }
void rot(double* x, double* y, double c, double s, std::size_t n) { active_table().rot(x, y, c, s, n); }
void abs_diff(double a, const double* y, double* out, std::size_t n) { active_table().abs_diff(a, y, out, n); }
void sq_diff(double a, const double* y, double* out, std::size_t n) { active_table().sq_diff(a, y, out, n); }
void scale(double a, double* x, std::size_t n) { active_table().scale(a, x, n); }
double sum(const double* x, std::size_t n) { return active_table().sum(x, n); }

} // namespace gw::kernels
