#include "hcprisk/sensitivity.hpp"

#include "hcprisk/errors.hpp"
#include "hcprisk/io.hpp"
#include "hcprisk/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hcprisk {
namespace {

constexpr std::size_t kMaxBlock = 4096;

void check_levels(const LevelSet& levels) {
    if (levels.probs.empty()) throw DomainError("level set is empty");
    if (levels.probs.size() > 10) {
        throw DomainError("at most 10 levels are supported (codes are digits)");
    }
    for (double p : levels.probs) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError("level probability outside [0,1]");
        }
    }
}

std::uint64_t checked_power(std::uint64_t base, unsigned exp) {
    std::uint64_t result = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (result > kEnumerationBudget) break;
        result *= base;
    }
    if (result > kEnumerationBudget) {
        std::ostringstream msg;
        msg << "enumerating " << base << "^" << exp << " = "
            << std::pow(static_cast<double>(base), static_cast<double>(exp))
            << " sequences exceeds the budget of " << kEnumerationBudget;
        throw DomainError(msg.str());
    }
    return result;
}

struct Moments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double sum_sq = 0.0;
};

// Shared enumeration core. Sequences are indexed 0..k^n-1; the base-k digits
// of the index, most significant first, are the per-contact levels. The low
// `b` digits form a block whose complement products are tabulated once; the
// high digits contribute a per-block prefix product. Block moments come from
// the dispatched kernel and are combined pairwise, so totals are bitwise
// reproducible and backend-independent.
Moments enumerate_core(const LevelSet& levels, unsigned n,
                       const std::function<void(std::uint64_t base,
                                                std::span<const double>)>* sink) {
    check_levels(levels);
    if (n < 1) throw DomainError("sequence length must be at least 1");
    const std::uint64_t k = levels.probs.size();
    const std::uint64_t total = checked_power(k, n);

    unsigned low_digits = 0;
    std::uint64_t block = 1;
    while (low_digits < n && block * k <= kMaxBlock) {
        block *= k;
        ++low_digits;
    }

    std::vector<double> complements(levels.probs.size());
    for (std::size_t i = 0; i < complements.size(); ++i) {
        complements[i] = 1.0 - levels.probs[i];
    }

    // low_products[j] = product of complements over the low digits of j.
    std::vector<double> low_products(block, 1.0);
    {
        std::uint64_t filled = 1;
        for (unsigned d = 0; d < low_digits; ++d) {
            for (std::uint64_t i = filled; i-- > 0;) {
                const double value = low_products[i];
                for (std::uint64_t digit = k; digit-- > 0;) {
                    low_products[i * k + digit] = value * complements[digit];
                }
            }
            filled *= k;
        }
    }

    const kernels::KernelOps& ops = kernels::active_kernels();
    kernels::PairwiseSum sum;
    kernels::PairwiseSum sum_sq;
    std::vector<double> buffer(sink != nullptr ? block : 0);

    const std::uint64_t high_count = total / block;
    const unsigned high_digits = n - low_digits;
    for (std::uint64_t hi = 0; hi < high_count; ++hi) {
        double prefix = 1.0;
        std::uint64_t rest = hi;
        for (unsigned d = 0; d < high_digits; ++d) {
            prefix *= complements[rest % k];
            rest /= k;
        }
        const kernels::BlockMoments m = ops.risk_block(
            prefix, low_products.data(), static_cast<std::size_t>(block),
            sink != nullptr ? buffer.data() : nullptr);
        sum.push(m.sum);
        sum_sq.push(m.sum_sq);
        if (sink != nullptr) {
            (*sink)(hi * block, std::span<const double>(buffer.data(), block));
        }
    }

    Moments out;
    out.count = total;
    out.mean = sum.value() / static_cast<double>(total);
    out.sum_sq = sum_sq.value();
    return out;
}

std::string code_of(std::uint64_t index, std::uint64_t k, unsigned n) {
    std::string code(n, '0');
    for (unsigned d = n; d-- > 0;) {
        code[d] = static_cast<char>('0' + index % k);
        index /= k;
    }
    return code;
}

}  // namespace

EnumerationSummary for_each_sequence_risk(
    const LevelSet& levels, unsigned n,
    const std::function<void(const SequenceRisk&)>& sink) {
    const std::uint64_t k = levels.probs.size();
    std::function<void(std::uint64_t, std::span<const double>)> block_sink =
        [&](std::uint64_t base, std::span<const double> risks) {
            SequenceRisk row;
            for (std::size_t i = 0; i < risks.size(); ++i) {
                row.code = code_of(base + i, k, n);
                row.risk = risks[i];
                sink(row);
            }
        };
    const Moments m = enumerate_core(levels, n, &block_sink);

    EnumerationSummary summary;
    summary.sequences = m.count;
    summary.mean = m.mean;
    if (m.count >= 2) {
        const double centered =
            m.sum_sq - static_cast<double>(m.count) * m.mean * m.mean;
        summary.sample_sd =
            std::sqrt(std::max(centered, 0.0) / static_cast<double>(m.count - 1));
    }
    return summary;
}

EnumerationResult enumerate_sequence_risks(const LevelSet& levels, unsigned n) {
    EnumerationResult result;
    result.summary = for_each_sequence_risk(
        levels, n,
        [&](const SequenceRisk& row) { result.sequences.push_back(row); });
    return result;
}

std::vector<SurfacePoint> response_surface(std::span<const double> p_low_grid,
                                           std::span<const unsigned> n_grid,
                                           double offset) {
    if (p_low_grid.empty() || n_grid.empty()) {
        throw DomainError("surface grid is empty");
    }
    std::vector<SurfacePoint> points;
    points.reserve(p_low_grid.size() * n_grid.size());
    for (double p_low : p_low_grid) {
        if (!(p_low >= 0.0 && p_low + offset <= 1.0)) {
            std::ostringstream msg;
            msg << "p_low " << p_low << " with offset " << offset
                << " leaves the high level outside [0,1]";
            throw DomainError(msg.str());
        }
        LevelSet levels{{p_low, p_low + offset}};
        for (unsigned n : n_grid) {
            const Moments m = enumerate_core(levels, n, nullptr);
            SurfacePoint pt;
            pt.p_low = p_low;
            pt.n_contacts = n;
            pt.mean = m.mean;
            pt.variance = std::max(
                m.sum_sq / static_cast<double>(m.count) - m.mean * m.mean, 0.0);
            points.push_back(pt);
        }
    }
    return points;
}

std::vector<double> default_p_low_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 50; ++i) grid.push_back(i / 100.0);
    return grid;
}

std::vector<unsigned> default_n_grid() {
    std::vector<unsigned> grid;
    for (unsigned n = 1; n <= 12; ++n) grid.push_back(n);
    return grid;
}

std::string surface_export(std::span<const SurfacePoint> points) {
    if (points.empty()) throw DomainError("no surface points to export");
    std::vector<SurfacePoint> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const SurfacePoint& a, const SurfacePoint& b) {
                  if (a.p_low != b.p_low) return a.p_low < b.p_low;
                  return a.n_contacts < b.n_contacts;
              });
    std::string out = "p_low,n,mean,variance\n";
    for (const SurfacePoint& pt : sorted) {
        out += io::format_g12(pt.p_low);
        out += ',';
        out += std::to_string(pt.n_contacts);
        out += ',';
        out += io::format_g12(pt.mean);
        out += ',';
        out += io::format_g12(pt.variance);
        out += '\n';
    }
    return out;
}

std::vector<SurfacePoint> surface_import(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line) || line != "p_low,n,mean,variance") {
        throw ParseError("surface CSV must start with 'p_low,n,mean,variance'");
    }
    std::vector<SurfacePoint> points;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string field;
        SurfacePoint pt;
        try {
            if (!std::getline(fields, field, ',')) throw std::invalid_argument("");
            pt.p_low = std::stod(field);
            if (!std::getline(fields, field, ',')) throw std::invalid_argument("");
            pt.n_contacts = static_cast<unsigned>(std::stoul(field));
            if (!std::getline(fields, field, ',')) throw std::invalid_argument("");
            pt.mean = std::stod(field);
            if (!std::getline(fields, field, ',')) throw std::invalid_argument("");
            pt.variance = std::stod(field);
        } catch (const std::exception&) {
            throw ParseError("surface CSV line " + std::to_string(line_no) +
                             ": malformed row");
        }
        points.push_back(pt);
    }
    return points;
}

}  // namespace hcprisk
