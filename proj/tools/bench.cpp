// Timing comparison of the serial reference kernels against the OpenMP ones.
// Both paths must agree bit for bit; the max deviation column checks it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "cvsense/gkp.hpp"
#include "cvsense/qec_codes.hpp"
#include "cvsense/sensing.hpp"

using namespace cvsense;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <class Fn>
double timed(Fn fn, double& out) {
    double t0 = now_ms();
    out = fn();
    return now_ms() - t0;
}

void line(const char* name, std::function<double(ExecPolicy)> run) {
    double a = 0.0, b = 0.0;
    double ts = timed([&] { return run(ExecPolicy::serial); }, a);
    double tp = timed([&] { return run(ExecPolicy::parallel); }, b);
    std::printf("%-28s %10.1f ms %10.1f ms   x%-5.2f  dev %.3g\n", name, ts, tp, ts / tp,
                std::abs(a - b));
}

}  // namespace

int main() {
    std::printf("threads: %d\n", max_threads(ExecPolicy::parallel));
    std::printf("%-28s %13s %13s   %-6s %s\n", "kernel", "serial", "parallel", "speedup",
                "serial-vs-parallel dev");

    line("stabilizer_logical_noise", [](ExecPolicy pol) {
        StabilizerCodeConfig cfg{7, 1.5, 0.05, 0.0, 4096};
        return stabilizer_logical_noise(cfg, pol).sigma_q;
    });

    line("stabilizer_recursion_step", [](ExecPolicy pol) {
        PdfGrid p0 = PdfGrid::gaussian(0.0, 0.3, 4096);
        PdfGrid prev = PdfGrid::gaussian(0.0, 1.1, 4096);
        PdfGrid out = stabilizer_recursion_step(p0, prev, 0.7, pol);
        return pdf_moments(out).second;
    });

    line("fold_modulo", [](ExecPolicy pol) {
        PdfGrid p = PdfGrid::gaussian(0.0, 2.0, 65536);
        return pdf_moments(fold_modulo(p, kGkpPeriod, pol)).second;
    });

    line("tms_logical_noise", [](ExecPolicy pol) {
        TmsCodeConfig cfg{2.0, 0.0, 0.45, true};
        return tms_logical_noise(cfg, 400000, RngStream(11, 1), pol).sigma_q;
    });

    line("mc_single_quadrature", [](ExecPolicy pol) {
        auto cfg = SensorNetworkConfig::uniform(16, 16.0, 0.9);
        std::vector<double> field(16, 0.1);
        return mc_single_quadrature(cfg, field, NoCode{}, 100000, RngStream(12, 1), pol).rms;
    });

    line("mc_complex_protocol", [](ExecPolicy pol) {
        PriorModel prior = PriorModel::from_k(1.0, 16, 4.0);
        return mc_complex_protocol(16, 4.0, {0.05, -0.02}, prior, 50000, RngStream(13, 1), pol)
            .dq_re;
    });

    return 0;
}
