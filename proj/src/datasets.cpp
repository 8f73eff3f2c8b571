#include "hrt/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hrt/rng.hpp"

namespace hrt::datasets {

FunctionId function_from_name(const std::string& name) {
    if (name == "sinc") return FunctionId::Sinc;
    if (name == "twisted_sigmoid") return FunctionId::TwistedSigmoid;
    if (name == "f1") return FunctionId::F1;
    if (name == "f2") return FunctionId::F2;
    if (name == "f3") return FunctionId::F3;
    if (name == "f4") return FunctionId::F4;
    throw Error("unknown synthetic function: " + name);
}

std::string function_name(FunctionId id) {
    switch (id) {
        case FunctionId::Sinc: return "sinc";
        case FunctionId::TwistedSigmoid: return "twisted_sigmoid";
        case FunctionId::F1: return "f1";
        case FunctionId::F2: return "f2";
        case FunctionId::F3: return "f3";
        case FunctionId::F4: return "f4";
    }
    return "?";
}

int function_dim(FunctionId id) {
    return (id == FunctionId::Sinc || id == FunctionId::TwistedSigmoid) ? 1 : 2;
}

void function_domain(FunctionId id, double* lo, double* hi) {
    const double b = id == FunctionId::Sinc ? 1.5 : 3.0;
    for (int k = 0; k < function_dim(id); ++k) {
        lo[k] = -b;
        hi[k] = b;
    }
}

double eval_function(FunctionId id, const double* x) {
    switch (id) {
        case FunctionId::Sinc: {
            if (x[0] == 0.0) return -1.0;   // limit of -sin(u)/u
            const double u = 5.0 * std::numbers::pi * x[0];
            return -std::sin(u) / u;
        }
        case FunctionId::TwistedSigmoid:
            return 2.0 / (1.0 + std::exp(-3.0 * x[0])) - 0.8 * x[0];
        case FunctionId::F1:
            return 0.5 * x[0] * x[0] * x[0] - 2.0 * x[0] * x[1] * x[1] +
                   3.0 * std::sin(4.0 * x[0]) * std::cos(2.0 * x[1]) +
                   0.1 * std::exp(-(x[0] * x[0] + x[1] * x[1]));
        case FunctionId::F2:
            return std::sin(3.0 * x[0]) + std::cos(2.0 * x[1]) +
                   0.5 * std::sin(5.0 * x[0]) * std::cos(4.0 * x[1]);
        case FunctionId::F3: {
            const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]) + 1e-6;
            return (x[0] * x[0] - x[1] * x[1]) / (0.5 + r * r) + std::sin(r) * std::exp(-r);
        }
        case FunctionId::F4:
            return 2.0 * std::exp(-((x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 1.0) * (x[1] - 1.0)) / 0.5) -
                   3.0 * std::exp(-((x[0] + 1.0) * (x[0] + 1.0) + (x[1] + 1.5) * (x[1] + 1.5)) / 0.3) +
                   0.5 * x[0];
    }
    return 0.0;
}

DesignMatrix generate(const SyntheticSpec& spec) {
    const int d = function_dim(spec.fn);
    double lo[2], hi[2];
    function_domain(spec.fn, lo, hi);

    Rng rng(mix_seed(spec.seed));
    std::normal_distribution<double> gauss(0.0, 1.0);

    DesignMatrix data(d);
    double x[2];
    for (int i = 0; i < spec.n_samples; ++i) {
        for (int k = 0; k < d; ++k) {
            std::uniform_real_distribution<double> u(lo[k], hi[k]);
            x[k] = u(rng);
        }
        double y = eval_function(spec.fn, x);
        if (spec.noise_sigma > 0.0) y += spec.noise_sigma * gauss(rng);
        data.add_row(std::span(x, static_cast<std::size_t>(d)), y);
    }
    return data;
}

std::pair<DesignMatrix, DesignMatrix> split(const DesignMatrix& data, const SplitSpec& spec) {
    const int n = data.n();
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(mix_seed(spec.seed));
    std::shuffle(idx.begin(), idx.end(), rng);

    const int n_train = static_cast<int>(spec.train_fraction * n);
    std::span<const int> all(idx);
    return {data.subset(all.first(static_cast<std::size_t>(n_train))),
            data.subset(all.subspan(static_cast<std::size_t>(n_train)))};
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    if (!cells.empty() && !cells.back().empty() && cells.back().back() == '\r')
        cells.back().pop_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    const char* t = e;
    while (t > b && (t[-1] == ' ' || t[-1] == '\t')) --t;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(b, t, v);
    if (ec != std::errc{} || ptr != t)
        throw ParseError(row, col, "not a number: '" + cell + "'");
    return v;
}

} // namespace

DesignMatrix load_csv(const std::string& path, const std::string& target, bool header) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);

    std::string line;
    std::size_t width = 0;
    std::size_t target_col = 0;
    bool target_resolved = false;

    if (header) {
        if (!std::getline(in, line)) throw Error("empty CSV file: " + path);
        const auto names = split_line(line);
        width = names.size();
        for (std::size_t c = 0; c < names.size(); ++c)
            if (names[c] == target) {
                target_col = c;
                target_resolved = true;
                break;
            }
    }
    if (!target_resolved) {
        std::size_t idx = 0;
        auto [ptr, ec] = std::from_chars(target.data(), target.data() + target.size(), idx);
        if (ec != std::errc{} || ptr != target.data() + target.size())
            throw MissingTarget("target column '" + target + "' not found");
        target_col = idx;
        target_resolved = true;
    }

    DesignMatrix data;
    std::size_t row_no = 0;
    std::vector<double> feats;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row_no;
        const auto cells = split_line(line);
        if (width == 0) {
            width = cells.size();
            if (target_col >= width)
                throw MissingTarget("target index " + std::to_string(target_col) +
                                    " out of range for " + std::to_string(width) + " columns");
            data = DesignMatrix(static_cast<int>(width) - 1);
        }
        if (cells.size() != width)
            throw RaggedRows("row " + std::to_string(row_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(width));
        if (target_col >= width)
            throw MissingTarget("target index " + std::to_string(target_col) +
                                " out of range for " + std::to_string(width) + " columns");
        if (data.d() == 0 && width > 0) data = DesignMatrix(static_cast<int>(width) - 1);

        feats.clear();
        double y = 0.0;
        for (std::size_t c = 0; c < width; ++c) {
            const double v = parse_cell(cells[c], row_no, c + 1);
            if (c == target_col)
                y = v;
            else
                feats.push_back(v);
        }
        data.add_row(feats, y);
    }
    if (data.n() == 0) throw Error("no data rows in " + path);
    return data;
}

void write_csv(const std::string& path, const DesignMatrix& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");

    std::string buf;
    for (int k = 0; k < data.d(); ++k) buf += "x" + std::to_string(k + 1) + ",";
    buf += "y\n";

    char num[32];
    auto put = [&](double v) {
        auto [ptr, ec] = std::to_chars(num, num + sizeof num, v);
        buf.append(num, ptr);
    };
    for (int i = 0; i < data.n(); ++i) {
        for (int k = 0; k < data.d(); ++k) {
            put(data.row(i)[k]);
            buf.push_back(',');
        }
        put(data.target(i));
        buf.push_back('\n');
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("failed writing " + path);
}

} // namespace hrt::datasets
