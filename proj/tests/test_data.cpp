#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "qcbm/data.hpp"
#include "qcbm/dataset_io.hpp"
#include "qcbm/pipeline.hpp"
#include "qcbm/synthetic_rates.hpp"
#include "qcbm/timeseries.hpp"

using namespace qcbm;
using namespace std::chrono;

namespace {

// An image is bars-and-stripes iff every row is constant or every column is.
bool is_bas(Bitstring x, int rows, int cols) {
    bool rows_const = true, cols_const = true;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int v = bit_at(x, r * cols + c);
            rows_const &= v == bit_at(x, r * cols);
            cols_const &= v == bit_at(x, c);
        }
    return rows_const || cols_const;
}

}  // namespace

TEST(Bas, SizesAndMembership) {
    for (auto [r, c, expected] : {std::tuple{3, 3, 14u}, std::tuple{2, 2, 6u}, std::tuple{2, 3, 10u}, std::tuple{4, 4, 30u}}) {
        const auto d = generate_bas(r, c);
        EXPECT_EQ(d.size(), expected);
        EXPECT_EQ(d.n_features, r * c);
        const std::set<Bitstring> uniq(d.samples.begin(), d.samples.end());
        EXPECT_EQ(uniq.size(), d.size());
        // Brute force over every image.
        std::size_t count = 0;
        for (Bitstring x = 0; x < (Bitstring{1} << (r * c)); ++x) count += is_bas(x, r, c) ? 1 : 0;
        EXPECT_EQ(count, expected);
        for (auto x : d.samples) EXPECT_TRUE(is_bas(x, r, c));
    }
    EXPECT_THROW(generate_bas(0, 3), ValidationError);
}

TEST(Bas, SnakeOrder) {
    EXPECT_EQ(snake_order(3, 3), (std::vector<int>{0, 1, 2, 5, 4, 3, 6, 7, 8}));
    EXPECT_EQ(snake_order(2, 2), (std::vector<int>{0, 1, 3, 2}));
    const auto bas = generate_bas(3, 3);
    const auto order = snake_order(3, 3);
    const auto p = permute_features(bas, order);
    EXPECT_EQ(p.feature_order, order);
    for (std::size_t s = 0; s < bas.size(); ++s)
        for (int q = 0; q < 9; ++q) EXPECT_EQ(p.bit(s, q), bas.bit(s, order[static_cast<std::size_t>(q)]));
    const auto back = permute_features(p, inverse_permutation(order));
    EXPECT_EQ(back.samples, bas.samples);
    const std::vector<int> bad{0, 0, 1, 2, 3, 4, 5, 6, 7};
    EXPECT_THROW(permute_features(bas, bad), ValidationError);
}

TEST(Quantize, BoundariesAndExamples) {
    const Quantizer q{-1.0, 1.0, 4};
    EXPECT_EQ(quantize(-1.0, q), 0u);
    EXPECT_EQ(quantize(1.0, q), 15u);
    EXPECT_EQ(quantize(0.0, q), 7u);  // floor(15 * 0.5)
    bool clamped = false;
    EXPECT_EQ(quantize(-3.0, q, &clamped), 0u);
    EXPECT_TRUE(clamped);
    EXPECT_EQ(quantize(2.0, q, &clamped), 15u);
    EXPECT_TRUE(clamped);
    EXPECT_EQ(quantize(0.5, q, &clamped), 11u);
    EXPECT_FALSE(clamped);
    EXPECT_THROW(quantize(0.0, Quantizer{1.0, 1.0, 4}), ValidationError);
    EXPECT_THROW(quantize(0.0, Quantizer{0.0, 1.0, 0}), ValidationError);
}

TEST(Quantize, RoundtripWithinOneStep) {
    std::mt19937_64 rng(12);
    const Quantizer q{-2.5, 7.25, 4};
    std::uniform_real_distribution<double> u(q.x_min, q.x_max);
    for (int i = 0; i < 10000; ++i) {
        const double x = u(rng);
        const auto code = quantize(x, q);
        ASSERT_LE(code, 15u);
        const double back = dequantize(code, q);
        EXPECT_LE(back, x + 1e-12);
        EXPECT_LT(x - back, q.step() + 1e-12);
    }
    EXPECT_THROW(dequantize(16, q), ValidationError);
}

TEST(Quantize, MonotoneAndAllClampsCounted) {
    const Quantizer q{0.0, 1.0, 3};
    std::vector<double> xs;
    for (int i = -10; i <= 110; ++i) xs.push_back(i / 100.0);
    const auto r = quantize_all(xs, q);
    for (std::size_t i = 1; i < r.codes.size(); ++i) EXPECT_GE(r.codes[i], r.codes[i - 1]);
    EXPECT_EQ(r.clamped, 20u);
}

TEST(Pack, LayoutAndRoundtrip) {
    // Feature 0 = 0b1000 -> MSB on column 0; feature 1 = 0b0001 -> column 7.
    const auto d = pack_features({{8, 1}}, 4);
    EXPECT_EQ(d.n_features, 8);
    EXPECT_EQ(to_string(d.samples[0], 8), "10000001");
    EXPECT_EQ(d.samples[0], (Bitstring{1} << 0) | (Bitstring{1} << 7));
    std::mt19937_64 rng(1);
    std::vector<std::vector<std::uint32_t>> codes(50, std::vector<std::uint32_t>(4));
    for (auto& row : codes)
        for (auto& v : row) v = static_cast<std::uint32_t>(rng() % 16);
    EXPECT_EQ(unpack_features(pack_features(codes, 4), 4), codes);
    EXPECT_THROW(pack_features({{16}}, 4), ValidationError);
    EXPECT_THROW(pack_features({{1, 2}, {3}}, 4), ValidationError);
    EXPECT_THROW(pack_features({}, 4), ValidationError);
}

TEST(Split, SizesDisjointAndDeterministic) {
    const auto bas = generate_bas(3, 3);
    const auto s = split(bas, 0.8, 42);
    EXPECT_EQ(s.train.size(), 11u);
    EXPECT_EQ(s.test.size(), 3u);
    std::multiset<Bitstring> all(s.train.samples.begin(), s.train.samples.end());
    all.insert(s.test.samples.begin(), s.test.samples.end());
    EXPECT_EQ(all, std::multiset<Bitstring>(bas.samples.begin(), bas.samples.end()));
    const auto again = split(bas, 0.8, 42);
    EXPECT_EQ(again.train.samples, s.train.samples);
    EXPECT_NE(split(bas, 0.8, 43).train.samples, s.train.samples);
    const auto chrono = split(bas, 0.5, 0, SplitMode::Chronological);
    EXPECT_EQ(chrono.train.samples, std::vector<Bitstring>(bas.samples.begin(), bas.samples.begin() + 7));
    EXPECT_THROW(split(bas, 1.0, 0), ValidationError);
    EXPECT_THROW(split(bas, 0.0, 0), ValidationError);
}

TEST(DatasetIo, RoundtripWithMetadata) {
    auto d = permute_features(generate_bas(2, 2), snake_order(2, 2));
    std::stringstream ss;
    write_dataset(ss, d);
    const auto r = read_dataset(ss);
    EXPECT_EQ(r.samples, d.samples);
    EXPECT_EQ(r.feature_order, d.feature_order);

    auto q = pack_features({{3, 0}, {1, 2}}, 2);
    q.quantizers = {Quantizer{-0.1, 0.3, 2}, Quantizer{0.1 / 3.0, 1e-7, 2}};
    std::stringstream sq;
    write_dataset(sq, q);
    const auto rq = read_dataset(sq);
    ASSERT_EQ(rq.quantizers.size(), 2u);
    EXPECT_EQ(rq.quantizers[1].x_min, q.quantizers[1].x_min);
    EXPECT_EQ(rq.quantizers[1].x_max, q.quantizers[1].x_max);
}

TEST(DatasetIo, LayoutIsMsbFirst) {
    std::ostringstream os;
    write_dataset(os, BinaryDataset(3, {0b001, 0b110}));
    EXPECT_EQ(os.str(), "001\n110\n");
}

TEST(DatasetIo, MalformedInput) {
    std::istringstream a("0101\n011\n");
    try {
        read_dataset(a);
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    std::istringstream b("01x1\n");
    EXPECT_THROW(read_dataset(b), FormatError);
    std::istringstream c("# only a comment\n");
    EXPECT_THROW(read_dataset(c), FormatError);
    std::istringstream d("# feature_order=0,0\n01\n");
    EXPECT_THROW(read_dataset(d), FormatError);
}

TEST(Timeseries, ParseDates) {
    EXPECT_EQ(parse_date("2024-03-05"), (Date{year{2024}, month{3}, day{5}}));
    EXPECT_EQ(parse_date("2024/3/5"), (Date{year{2024}, month{3}, day{5}}));
    EXPECT_FALSE(parse_date("2024/13/5"));
    EXPECT_FALSE(parse_date("2023-02-29"));
    EXPECT_FALSE(parse_date("yesterday"));
    EXPECT_EQ(format_date(Date{year{2001}, month{2}, day{3}}), "2001-02-03");
}

TEST(Timeseries, CsvWithPreambleAndMissing) {
    std::istringstream is(
        "Some title\n(Unit : %)\nDate,1Y,5Y,10Y\n"
        "2020/1/6,0.1,0.2,0.3\n2020/1/7,-,0.25,0.35\n2020/1/8,0.15,0.3,\n2020/1/9,0.2,0.35,0.5\n");
    CsvLoadOptions opts;
    opts.series = {"10Y", "1Y"};
    const auto r = read_timeseries_csv(is, opts);
    EXPECT_EQ(r.dropped_missing, 2u);
    ASSERT_EQ(r.series.length(), 2u);
    EXPECT_EQ(r.series.names, (std::vector<std::string>{"10Y", "1Y"}));
    EXPECT_DOUBLE_EQ(r.series.values[0][1], 0.5);
    EXPECT_DOUBLE_EQ(r.series.values[1][0], 0.1);
}

TEST(Timeseries, DateRangeFilter) {
    std::istringstream is("Date,A\n2020-01-01,1\n2020-01-02,2\n2020-01-03,3\n");
    CsvLoadOptions opts;
    opts.from = Date{year{2020}, month{1}, day{2}};
    opts.to = Date{year{2020}, month{1}, day{2}};
    const auto r = read_timeseries_csv(is, opts);
    EXPECT_EQ(r.series.length(), 1u);
    EXPECT_EQ(r.dropped_out_of_range, 2u);
}

TEST(Timeseries, CsvErrors) {
    std::istringstream a("Date,A\n2020-01-01,1\nnot-a-date,2\n");
    try {
        read_timeseries_csv(a);
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    std::istringstream b("Date,A\n2020-01-02,1\n2020-01-01,2\n");
    EXPECT_THROW(read_timeseries_csv(b), FormatError);
    std::istringstream c("Date,A\n2020-01-01,abc\n");
    EXPECT_THROW(read_timeseries_csv(c), FormatError);
    std::istringstream d("Date,A\n2020-01-01,1\n");
    CsvLoadOptions opts;
    opts.series = {"B"};
    EXPECT_THROW(read_timeseries_csv(d, opts), FormatError);
}

TEST(Timeseries, Difference) {
    TimeSeries s;
    s.dates = {Date{year{2020}, month{1}, day{1}}, Date{year{2020}, month{1}, day{2}}, Date{year{2020}, month{1}, day{5}}};
    s.names = {"A"};
    s.values = {{1.0, 1.5, 1.25}};
    const auto d = difference(s);
    ASSERT_EQ(d.length(), 2u);
    EXPECT_EQ(d.dates[0], s.dates[1]);
    EXPECT_DOUBLE_EQ(d.values[0][0], 0.5);
    EXPECT_DOUBLE_EQ(d.values[0][1], -0.25);
    TimeSeries one = s;
    one.dates.resize(1);
    one.values[0].resize(1);
    EXPECT_THROW(difference(one), ValidationError);
}

TEST(Pipeline, ChronologicalSplitUsesTrainRange) {
    TimeSeries s;
    for (int i = 0; i < 10; ++i) s.dates.push_back(sys_days(Date{year{2020}, month{1}, day{1}}) + days{i});
    s.names = {"A", "B"};
    s.values = {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {5, 4, 3, 2, 1, 0, 1, 2, 3, 4}};
    const auto r = quantize_split(s, 2, 0.5);
    EXPECT_EQ(r.train.size(), 5u);
    EXPECT_EQ(r.test.size(), 5u);
    EXPECT_EQ(r.train.n_features, 4);
    ASSERT_EQ(r.train.quantizers.size(), 2u);
    EXPECT_EQ(r.train.quantizers[0].x_min, 0.0);
    EXPECT_EQ(r.train.quantizers[0].x_max, 4.0);
    EXPECT_EQ(r.train.quantizers[1].x_min, 1.0);
    EXPECT_EQ(r.train.quantizers[1].x_max, 5.0);
    // A: 5..9 all above 4; B: 0 below 1.
    EXPECT_EQ(r.clamped_test, 6u);
    const auto codes = unpack_features(r.train, 2);
    EXPECT_EQ(codes[0], (std::vector<std::uint32_t>{0, 3}));
    EXPECT_EQ(codes[4], (std::vector<std::uint32_t>{3, 0}));
    s.values[1] = std::vector<double>(10, 1.0);
    EXPECT_THROW(quantize_split(s, 2, 0.5), ValidationError);
}

TEST(SyntheticRates, DeterministicAndWellFormed) {
    SyntheticRatesConfig cfg;
    cfg.end = Date{year{2001}, month{6}, day{30}};
    const auto a = generate_synthetic_rates(cfg);
    const auto b = generate_synthetic_rates(cfg);
    std::ostringstream sa, sb;
    write_rates_csv(sa, a);
    write_rates_csv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    cfg.seed = 1;
    std::ostringstream sc;
    write_rates_csv(sc, generate_synthetic_rates(cfg));
    EXPECT_NE(sa.str(), sc.str());
    for (const auto& d : a.dates) {
        const weekday w{sys_days(d)};
        EXPECT_NE(w, Saturday);
        EXPECT_NE(w, Sunday);
    }
    ASSERT_EQ(a.values.size(), 4u);

    std::istringstream is(sa.str());
    const auto loaded = read_timeseries_csv(is);
    EXPECT_EQ(loaded.series.names, a.names);
    std::size_t complete = 0;
    for (std::size_t t = 0; t < a.dates.size(); ++t) {
        bool ok = true;
        for (const auto& v : a.values) ok &= !std::isnan(v[t]);
        complete += ok ? 1 : 0;
    }
    EXPECT_EQ(loaded.series.length(), complete);
    EXPECT_EQ(loaded.dropped_missing, a.dates.size() - complete);
}
