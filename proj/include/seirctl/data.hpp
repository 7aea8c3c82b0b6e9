#ifndef SEIRCTL_DATA_HPP
#define SEIRCTL_DATA_HPP

#include <algorithm>
#include <cstddef>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "seirctl/errors.hpp"
#include "seirctl/forward.hpp"
#include "seirctl/grid.hpp"
#include "seirctl/model.hpp"

namespace seirctl {

/**
 * @brief Reported cumulative infection and death counts at increasing day
 * offsets, plus the region label and its initial population.
 */
struct ObservedSeries {
    std::vector<double> times;     ///< day offsets, strictly increasing, times[0] is the initial datum
    std::vector<double> confirmed; ///< cumulative confirmed infections I_c
    std::vector<double> deaths;    ///< cumulative deaths D_c
    std::string region;
    double population = 0.0; ///< living population N(0)
    std::string day0_date;   ///< source date of the first entry, when parsed from files
    int monotone_repairs = 0; ///< reported-value corrections flattened by running max

    std::size_t size() const { return times.size(); }

    void validate() const
    {
        if (times.size() != confirmed.size() || times.size() != deaths.size())
            throw DataError("ObservedSeries: column lengths differ");
        for (std::size_t j = 0; j + 1 < times.size(); ++j)
            if (!(times[j] < times[j + 1]))
                throw DataError("ObservedSeries: times must be strictly increasing");
        for (std::size_t j = 0; j < times.size(); ++j)
            if (confirmed[j] < 0.0 || deaths[j] < 0.0)
                throw DataError("ObservedSeries: counts must be non-negative");
    }
};

/// Desired cumulative counts at an end time.
struct TargetPoint {
    double time = 0.0;
    double I_d = 0.0;
    double D_d = 0.0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t p = 0; p < line.size(); ++p) {
        const char ch = line[p];
        if (quoted) {
            if (ch == '"') {
                if (p + 1 < line.size() && line[p + 1] == '"') {
                    cur += '"';
                    ++p;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

struct WideTable {
    std::vector<std::string> dates;  ///< date column headers, in file order
    std::vector<double> region_sum;  ///< per-date sum over rows matching the region
};

/// Parse one CSSE wide-format file and sum all rows of the requested region.
inline WideTable parse_csse_file(std::string_view content, const std::string& region,
                                 const std::string& file_label)
{
    std::istringstream in{std::string(content)};
    std::string line;
    if (!std::getline(in, line))
        throw DataError(file_label + ": empty file");
    const auto header = split_csv_line(line);
    if (header.size() < 5 || header[1] != "Country/Region")
        throw DataError(file_label + ": expected CSSE wide header "
                                     "(Province/State,Country/Region,Lat,Long,dates...)");

    WideTable table;
    table.dates.assign(header.begin() + 4, header.end());
    table.region_sum.assign(table.dates.size(), 0.0);

    bool found = false;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError(file_label + ": row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
        if (fields[1] != region) continue;
        found = true;
        for (std::size_t c = 4; c < fields.size(); ++c) {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(fields[c], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != fields[c].size() || fields[c].empty())
                throw DataError(file_label + ": non-numeric cell at row " + std::to_string(row) +
                                ", column " + std::to_string(c + 1) + " ('" + fields[c] + "')");
            table.region_sum[c - 4] += value;
        }
    }
    if (!found) throw DataError(file_label + ": region '" + region + "' not found");
    return table;
}

} // namespace detail

/**
 * @brief Ingest a CSSE-format confirmed/deaths file pair for one region.
 *
 * Rows matching the region are summed per date; day 0 becomes the first date
 * with at least one confirmed case and earlier dates are dropped. Reported
 * cumulative values that decrease (data corrections) are repaired by running
 * max, counted in monotone_repairs. The population field is left at 0 and
 * must be supplied from a population table.
 */
inline ObservedSeries parse_csse(std::string_view confirmed_csv, std::string_view deaths_csv,
                                 const std::string& region)
{
    const auto confirmed = detail::parse_csse_file(confirmed_csv, region, "confirmed");
    const auto deaths = detail::parse_csse_file(deaths_csv, region, "deaths");
    if (confirmed.dates != deaths.dates)
        throw DataError("parse_csse: confirmed and deaths date axes are misaligned");

    std::size_t day0 = 0;
    while (day0 < confirmed.region_sum.size() && confirmed.region_sum[day0] < 1.0) ++day0;
    if (day0 == confirmed.region_sum.size())
        throw DataError("parse_csse: region '" + region + "' never reaches one confirmed case");

    ObservedSeries series;
    series.region = region;
    series.day0_date = confirmed.dates[day0];
    const std::size_t len = confirmed.region_sum.size() - day0;
    series.times.resize(len);
    series.confirmed.resize(len);
    series.deaths.resize(len);
    double run_c = 0.0, run_d = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
        series.times[j] = static_cast<double>(j);
        const double c = confirmed.region_sum[day0 + j];
        const double d = deaths.region_sum[day0 + j];
        if (c < run_c || d < run_d) ++series.monotone_repairs;
        run_c = std::max(run_c, c);
        run_d = std::max(run_d, d);
        series.confirmed[j] = run_c;
        series.deaths[j] = run_d;
    }
    series.validate();
    return series;
}

/**
 * @brief Keep the initial datum and every stride-th entry after it.
 */
inline ObservedSeries sample_observations(const ObservedSeries& series, double stride)
{
    series.validate();
    if (stride < 1.0) throw DataError("sample_observations: stride must be >= 1 day");
    if (series.times.empty() || series.times[0] + stride > series.times.back())
        throw DataError("sample_observations: stride exceeds the series range");

    ObservedSeries out;
    out.region = series.region;
    out.population = series.population;
    out.day0_date = series.day0_date;
    out.monotone_repairs = series.monotone_repairs;
    out.times.push_back(series.times[0]);
    out.confirmed.push_back(series.confirmed[0]);
    out.deaths.push_back(series.deaths[0]);
    for (double t = series.times[0] + stride; t <= series.times.back() + 1e-9; t += stride) {
        const auto it = std::lower_bound(series.times.begin(), series.times.end(), t - 1e-9);
        if (it == series.times.end() || std::abs(*it - t) > 1e-9)
            throw DataError("sample_observations: no entry at day " + std::to_string(t));
        const std::size_t j = static_cast<std::size_t>(it - series.times.begin());
        out.times.push_back(series.times[j]);
        out.confirmed.push_back(series.confirmed[j]);
        out.deaths.push_back(series.deaths[j]);
    }
    return out;
}

/**
 * @brief U0 = [N(0) - I_c(0), 0, I_c(0), 0, D_c(0)].
 */
inline StateVec initial_state(const ObservedSeries& series)
{
    series.validate();
    if (series.size() == 0) throw DataError("initial_state: empty series");
    if (!(series.population > series.confirmed[0]))
        throw DomainError("initial_state: population must exceed the initial confirmed count");
    return StateVec{series.population - series.confirmed[0], 0.0, series.confirmed[0], 0.0,
                    series.deaths[0]};
}

/// Long-format export: date_offset,I_c,D_c with a header row.
inline void export_series_csv(const ObservedSeries& series, std::ostream& out)
{
    series.validate();
    out << "date_offset,I_c,D_c\n";
    for (std::size_t j = 0; j < series.size(); ++j)
        out << series.times[j] << ',' << series.confirmed[j] << ',' << series.deaths[j] << '\n';
}

/// Per-interval data-driven mu start values, clipped into the mu bounds.
struct MuInit {
    std::vector<double> per_interval; ///< one value per observation interval
    int fallbacks = 0;                ///< intervals that fell back to the bounds midpoint
};

/**
 * @brief mu_0 over interval [t_i, t_{i+1}] = (D_c(t_{i+1}) - D_c(t_i)) / ((t_{i+1} - t_i) I_c(t_{i+1})).
 *
 * Intervals with no infection count at the right endpoint fall back to the
 * midpoint of the mu bounds.
 */
inline MuInit mu_init(const ObservedSeries& series, const ParamBounds& bounds)
{
    series.validate();
    bounds.validate();
    if (series.size() < 2) throw DataError("mu_init: need at least two data points");

    MuInit out;
    out.per_interval.reserve(series.size() - 1);
    const double mid = 0.5 * (bounds.lower.mu + bounds.upper.mu);
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        double mu;
        if (series.confirmed[i + 1] > 0.0) {
            mu = (series.deaths[i + 1] - series.deaths[i]) /
                 ((series.times[i + 1] - series.times[i]) * series.confirmed[i + 1]);
            mu = std::clamp(mu, bounds.lower.mu, bounds.upper.mu);
        } else {
            mu = mid;
            ++out.fallbacks;
        }
        out.per_interval.push_back(mu);
    }
    return out;
}

/// Synthetic series plus the ground truth that generated it.
struct TwinData {
    ObservedSeries series;
    ParamTrajectory theta_star;
    StateTrajectory trajectory;
};

/**
 * @brief Twin-experiment generator: run the forward solver under theta_star,
 * record (I, D) at the observation times, optionally perturb by relative
 * uniform noise (flooring at the previous value to keep the series
 * monotone).
 */
inline TwinData synth_twin(const ParamTrajectory& theta_star, const StateVec& u0,
                           const SolverGrid& grid, double noise = 0.0, unsigned seed = 0)
{
    if (noise < 0.0) throw DomainError("synth_twin: noise must be non-negative");
    TwinData twin;
    twin.theta_star = theta_star;
    twin.trajectory = solve_forward(u0, theta_star, grid);

    auto& s = twin.series;
    s.region = "synthetic";
    s.population = u0.living();
    const std::size_t n = grid.intervals();
    s.times.resize(n + 1);
    s.confirmed.resize(n + 1);
    s.deaths.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        s.times[i] = grid.times[i];
        s.confirmed[i] = twin.trajectory.at_obs(i).I;
        s.deaths[i] = twin.trajectory.at_obs(i).D;
    }
    if (noise > 0.0) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (std::size_t i = 1; i <= n; ++i) {
            s.confirmed[i] = std::max(s.confirmed[i] * (1.0 + noise * unit(rng)), s.confirmed[i - 1]);
            s.deaths[i] = std::max(s.deaths[i] * (1.0 + noise * unit(rng)), s.deaths[i - 1]);
        }
    }
    return twin;
}

} // namespace seirctl

#endif // SEIRCTL_DATA_HPP
