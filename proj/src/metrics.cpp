#include "stunmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stunmix/error.hpp"
#include "stunmix/io.hpp"

namespace stunmix::metrics {

namespace {

void check_pair(std::span<const double> r, std::span<const double> a) {
    if (r.size() != a.size()) fail(ErrorKind::ShapeMismatch, "reference and prediction lengths differ");
    if (r.empty()) fail(ErrorKind::ShapeMismatch, "metric needs at least one sample");
}

bool constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

std::optional<double> cc(std::span<const double> r, std::span<const double> a) {
    check_pair(r, a);
    if (r.size() < 2 || constant(r) || constant(a)) return std::nullopt;
    const double rm = mean(r), am = mean(a);
    double num = 0.0, rr = 0.0, aa = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        num += (r[i] - rm) * (a[i] - am);
        rr += (r[i] - rm) * (r[i] - rm);
        aa += (a[i] - am) * (a[i] - am);
    }
    const double den = std::sqrt(rr * aa);
    if (!(den > 0.0)) return std::nullopt;
    return std::clamp(num / den, -1.0, 1.0);
}

double rmse(std::span<const double> r, std::span<const double> a) {
    check_pair(r, a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += (r[i] - a[i]) * (r[i] - a[i]);
    return std::sqrt(s / static_cast<double>(r.size()));
}

double mae(std::span<const double> r, std::span<const double> a) {
    check_pair(r, a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += std::abs(r[i] - a[i]);
    return s / static_cast<double>(r.size());
}

std::optional<double> rrmse(std::span<const double> r, std::span<const double> a) {
    check_pair(r, a);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        num += (r[i] - a[i]) * (r[i] - a[i]);
        den += r[i] * r[i];
    }
    if (den == 0.0) return std::nullopt;
    return std::sqrt(num / den);
}

int argmax(const Vector& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

F1Result f1_majority(const Matrix& refs, const Matrix& preds) {
    if (refs.rows() != preds.rows() || refs.cols() != preds.cols()) {
        fail(ErrorKind::ShapeMismatch, "reference and prediction matrices differ in shape");
    }
    if (refs.cols() < 1) fail(ErrorKind::ShapeMismatch, "F1 needs at least one sample");
    const auto k = static_cast<std::size_t>(refs.rows());
    std::vector<long long> tp(k, 0), fp(k, 0), fn(k, 0);
    for (Eigen::Index j = 0; j < refs.cols(); ++j) {
        const auto r = static_cast<std::size_t>(argmax(refs.col(j)));
        const auto p = static_cast<std::size_t>(argmax(preds.col(j)));
        if (r == p) {
            ++tp[r];
        } else {
            ++fp[p];
            ++fn[r];
        }
    }
    F1Result out;
    out.per_class.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        const long long den = 2 * tp[c] + fp[c] + fn[c];
        if (den > 0) out.per_class[c] = 2.0 * static_cast<double>(tp[c]) / static_cast<double>(den);
    }
    out.macro = macro_average(out.per_class);
    return out;
}

F1Result f1_majority(std::span<const AbundanceVector> refs, std::span<const AbundanceVector> preds) {
    if (refs.size() != preds.size()) fail(ErrorKind::ShapeMismatch, "reference and prediction counts differ");
    if (refs.empty()) fail(ErrorKind::ShapeMismatch, "F1 needs at least one sample");
    const Eigen::Index k = refs.front().values.size();
    Matrix r(k, static_cast<Eigen::Index>(refs.size())), p(k, static_cast<Eigen::Index>(refs.size()));
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (refs[i].values.size() != k || preds[i].values.size() != k) {
            fail(ErrorKind::ShapeMismatch, "abundance vectors differ in class count");
        }
        r.col(static_cast<Eigen::Index>(i)) = refs[i].values;
        p.col(static_cast<Eigen::Index>(i)) = preds[i].values;
    }
    return f1_majority(r, p);
}

std::optional<double> macro_average(std::span<const std::optional<double>> values) {
    double sum = 0.0;
    int n = 0;
    for (const auto& v : values) {
        if (v) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

ClassMetricReport compute_report(const Matrix& refs, const Matrix& preds, const std::vector<std::string>& classes) {
    if (refs.rows() != preds.rows() || refs.cols() != preds.cols()) {
        fail(ErrorKind::ShapeMismatch, "reference and prediction matrices differ in shape");
    }
    if (static_cast<Eigen::Index>(classes.size()) != refs.rows()) {
        fail(ErrorKind::ShapeMismatch, "class names do not match the class count");
    }
    if (refs.cols() < 1) fail(ErrorKind::EmptyTestSet, "no samples to evaluate");

    ClassMetricReport report;
    report.classes = classes;
    report.samples = static_cast<std::size_t>(refs.cols());
    const F1Result f1 = f1_majority(refs, preds);
    std::vector<std::optional<double>> ccs, rrmses, f1s;
    double rmse_sum = 0.0, mae_sum = 0.0;
    for (Eigen::Index c = 0; c < refs.rows(); ++c) {
        const Vector r = refs.row(c).transpose();
        const Vector a = preds.row(c).transpose();
        const std::span<const double> rs(r.data(), static_cast<std::size_t>(r.size()));
        const std::span<const double> as(a.data(), static_cast<std::size_t>(a.size()));
        ClassMetrics m;
        m.cc = cc(rs, as);
        m.rmse = rmse(rs, as);
        m.rrmse = rrmse(rs, as);
        m.mae = mae(rs, as);
        m.f1 = f1.per_class[static_cast<std::size_t>(c)];
        const std::string& name = classes[static_cast<std::size_t>(c)];
        if (!m.cc) report.warnings.push_back("CC undefined for class '" + name + "' (degenerate variance)");
        if (!m.rrmse) report.warnings.push_back("RRMSE undefined for class '" + name + "' (all references zero)");
        if (!m.f1) report.warnings.push_back("F1 undefined for class '" + name + "' (class never present)");
        ccs.push_back(m.cc);
        rrmses.push_back(m.rrmse);
        f1s.push_back(m.f1);
        rmse_sum += m.rmse;
        mae_sum += m.mae;
        report.per_class.push_back(m);
    }
    const double k = static_cast<double>(refs.rows());
    report.macro_cc = macro_average(ccs);
    report.macro_rmse = rmse_sum / k;
    report.macro_rrmse = macro_average(rrmses);
    report.macro_mae = mae_sum / k;
    report.macro_f1 = macro_average(f1s);
    return report;
}

std::string format_metric(const std::optional<double>& value) {
    return value ? io::format_double(*value) : std::string("NA");
}

std::string format_report_csv(const ClassMetricReport& report) {
    std::string out = "class,MAE,RMSE,RRMSE,CC,F1\n";
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const auto& m = report.per_class[c];
        out += report.classes[c] + ',' + io::format_double(m.mae) + ',' + io::format_double(m.rmse) + ',' +
               format_metric(m.rrmse) + ',' + format_metric(m.cc) + ',' + format_metric(m.f1) + '\n';
    }
    out += "macro," + io::format_double(report.macro_mae) + ',' + io::format_double(report.macro_rmse) + ',' +
           format_metric(report.macro_rrmse) + ',' + format_metric(report.macro_cc) + ',' +
           format_metric(report.macro_f1) + '\n';
    return out;
}

std::string format_report_table(const ClassMetricReport& report) {
    std::size_t width = 5;
    for (const auto& c : report.classes) width = std::max(width, c.size());
    auto pct = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
        return std::string(buf);
    };
    auto fixed = [](const std::optional<double>& v) {
        if (!v) return std::string("NA");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", *v);
        return std::string(buf);
    };
    auto row = [&](const std::string& name, double mae_v, double rmse_v, const std::optional<double>& rrmse_v,
                   const std::optional<double>& cc_v, const std::optional<double>& f1_v) {
        char buf[512];
        std::snprintf(buf, sizeof buf, "%-*s %10s %10s %10s %8s %8s\n", static_cast<int>(width), name.c_str(),
                      pct(mae_v).c_str(), pct(rmse_v).c_str(), rrmse_v ? pct(*rrmse_v).c_str() : "NA",
                      fixed(cc_v).c_str(), fixed(f1_v).c_str());
        return std::string(buf);
    };
    char head[512];
    std::snprintf(head, sizeof head, "%-*s %10s %10s %10s %8s %8s\n", static_cast<int>(width), "class", "MAE", "RMSE",
                  "RRMSE", "CC", "F1");
    std::string out = head;
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const auto& m = report.per_class[c];
        out += row(report.classes[c], m.mae, m.rmse, m.rrmse, m.cc, m.f1);
    }
    out += row("macro", report.macro_mae, report.macro_rmse, report.macro_rrmse, report.macro_cc, report.macro_f1);
    out += "N = " + std::to_string(report.samples) + "\n";
    for (const auto& w : report.warnings) out += "warning: " + w + "\n";
    return out;
}

std::string format_scatter_csv(const Matrix& refs, const Matrix& preds, const std::vector<std::string>& classes) {
    std::string out = "class,ref,pred\n";
    for (Eigen::Index j = 0; j < refs.cols(); ++j) {
        for (Eigen::Index c = 0; c < refs.rows(); ++c) {
            out += classes[static_cast<std::size_t>(c)] + ',';
            io::append_double(out, refs(c, j));
            out += ',';
            io::append_double(out, preds(c, j));
            out += '\n';
        }
    }
    return out;
}

}  // namespace stunmix::metrics
