#include "levyfields/schwinger.hpp"

#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include "levyfields/errors.hpp"
#include "levyfields/parallel.hpp"
#include "levyfields/partitions.hpp"
#include "levyfields/tabular.hpp"

namespace levyfields {

void TestFunction::validate() const {
    require_finite(field, "test function");
    if (!half_space_positive) return;
    const LatticeSpec& spec = field.spec;
    std::vector<int> idx(static_cast<std::size_t>(spec.d));
    for (std::size_t flat = 0; flat < field.size(); ++flat) {
        if (field[flat] == 0.0) continue;
        spec.decode(flat, idx.data());
        if (spec.coordinate(idx[0]) <= 0.0)
            throw SupportError("test function flagged positive-time has support at time <= 0");
    }
}

namespace {

// Convolves every argument once; all later block products reuse these.
std::vector<LatticeField> convolved_arguments(const KernelSpec& kspec,
                                              const std::vector<TestFunction>& phis,
                                              const char* what) {
    if (phis.empty()) throw SizeError(std::string(what) + ": needs at least one argument");
    for (const TestFunction& phi : phis) {
        phi.validate();
        require_same_spec(phi.field, phis.front().field, what);
    }
    std::vector<LatticeField> out;
    out.reserve(phis.size());
    for (const TestFunction& phi : phis) out.push_back(convolve(kspec, phi.field));
    return out;
}

// c_|B| * delta^d * sum_x prod_{j in block} conv[j-1](x); block elements are
// the 1-based slot numbers used by the partition walk.
double block_value(const LevyTriple& triple, const std::vector<LatticeField>& conv,
                   const std::vector<int>& block) {
    const double c = cumulant(triple, static_cast<int>(block.size()));
    if (c == 0.0) return 0.0;
    const LatticeField& first = conv[static_cast<std::size_t>(block.front() - 1)];
    const std::size_t count = first.size();
    const double volume = first.spec.cell_volume();
    const double sum = deterministic_sum(count, [&](std::size_t i) {
        double prod = first[i];
        for (std::size_t j = 1; j < block.size(); ++j)
            prod *= conv[static_cast<std::size_t>(block[j] - 1)][i];
        return prod;
    });
    return c * volume * sum;
}

} // namespace

double truncated_schwinger(const KernelSpec& kspec, const LevyTriple& triple,
                           const std::vector<TestFunction>& phis) {
    triple.validate();
    const std::vector<LatticeField> conv =
        convolved_arguments(kspec, phis, "truncated_schwinger");
    std::vector<int> all(phis.size());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j) + 1;
    return block_value(triple, conv, all);
}

double schwinger(const KernelSpec& kspec, const LevyTriple& triple,
                 const std::vector<TestFunction>& phis) {
    triple.validate();
    const std::vector<LatticeField> conv = convolved_arguments(kspec, phis, "schwinger");
    const auto evaluator = [&](const std::vector<int>& block) {
        return block_value(triple, conv, block);
    };
    return partitions::moments_from_truncated(evaluator, static_cast<int>(phis.size()));
}

SchwingerEstimate mc_schwinger(const KernelSpec& kspec, const LevyTriple& triple,
                               const std::vector<TestFunction>& phis,
                               std::int64_t n_samples, RngStream rng) {
    triple.validate();
    if (n_samples < 2) throw SizeError("mc_schwinger: needs at least 2 samples");
    if (phis.empty()) throw SizeError("mc_schwinger: needs at least one argument");
    for (const TestFunction& phi : phis) {
        phi.validate();
        require_same_spec(phi.field, phis.front().field, "mc_schwinger");
    }
    const LatticeSpec lattice = phis.front().field.spec;

    const std::int64_t n_batches = std::min<std::int64_t>(100, n_samples);
    const std::int64_t base = n_samples / n_batches;
    const std::int64_t remainder = n_samples % n_batches;
    std::vector<std::int64_t> start(static_cast<std::size_t>(n_batches) + 1, 0);
    for (std::int64_t b = 0; b < n_batches; ++b)
        start[static_cast<std::size_t>(b) + 1] =
            start[static_cast<std::size_t>(b)] + base + (b < remainder ? 1 : 0);

    std::vector<double> batch_sum(static_cast<std::size_t>(n_batches), 0.0);
    parallel_for(static_cast<std::size_t>(n_batches), [&](std::size_t b) {
        double acc = 0.0;
        for (std::int64_t s = start[b]; s < start[b + 1]; ++s) {
            // Per-sample stream: mixing the global sample index in keeps the
            // draw independent of the batch layout and the thread count.
            const RngStream sample_stream{
                rng.seed, detail::mix64(rng.stream_id +
                                        detail::kGolden * static_cast<std::uint64_t>(s + 1))};
            const LatticeField noise = sample_noise(triple, lattice, sample_stream);
            const LatticeField x = convolve(kspec, noise);
            double prod = 1.0;
            for (const TestFunction& phi : phis) prod *= lattice_inner(phi.field, x);
            acc += prod;
        }
        batch_sum[b] = acc;
    });

    double total = 0.0;
    for (double s : batch_sum) total += s;
    const double mean = total / static_cast<double>(n_samples);

    double var_of_means = 0.0;
    for (std::int64_t b = 0; b < n_batches; ++b) {
        const double m = batch_sum[static_cast<std::size_t>(b)] /
                         static_cast<double>(start[static_cast<std::size_t>(b) + 1] -
                                             start[static_cast<std::size_t>(b)]);
        var_of_means += (m - mean) * (m - mean);
    }
    var_of_means /= static_cast<double>(n_batches - 1);
    const double std_error = std::sqrt(var_of_means / static_cast<double>(n_batches));
    return SchwingerEstimate{mean, std_error, n_samples};
}

std::vector<std::pair<double, double>> cluster_scan(
    const KernelSpec& kspec, const LevyTriple& triple,
    const std::vector<TestFunction>& phis_left,
    const std::vector<TestFunction>& phis_right,
    const std::vector<double>& direction, const std::vector<double>& lambdas) {
    if (phis_left.empty() || phis_right.empty())
        throw SizeError("cluster_scan: both argument groups must be nonempty");
    const LatticeSpec& spec = phis_left.front().field.spec;
    if (static_cast<int>(direction.size()) != spec.d)
        throw DomainError("cluster_scan: direction dimension mismatch");
    double norm_sq = 0.0;
    for (double c : direction) norm_sq += c * c;
    if (std::abs(norm_sq - 1.0) > 1e-6)
        throw DomainError("cluster_scan: direction must be a unit vector");

    std::vector<std::pair<double, double>> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        std::vector<int> steps(direction.size());
        for (std::size_t a = 0; a < direction.size(); ++a)
            steps[a] = static_cast<int>(std::lround(lambda * direction[a] / spec.delta));
        std::vector<TestFunction> all = phis_left;
        for (const TestFunction& phi : phis_right)
            all.push_back(TestFunction{translate(phi.field, steps), false});
        out.emplace_back(lambda, truncated_schwinger(kspec, triple, all));
    }
    return out;
}

void write_cluster_csv(const std::vector<std::pair<double, double>>& scan,
                       std::ostream& out) {
    write_csv_row(out, {"lambda", "value", "abs_value", "log_abs_value"});
    for (const auto& [lambda, value] : scan)
        write_csv_row(out, {format_g17(lambda), format_g17(value),
                            format_g17(std::abs(value)),
                            format_g17(std::log(std::abs(value)))});
}

} // namespace levyfields
