#include "cli/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hessian/field_io.hpp"
#include "hessian/hess.hpp"

namespace cli {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(RowKind k) {
    switch (k) {
        case RowKind::Asserted: return "asserted";
        case RowKind::Fitted: return "fitted";
        case RowKind::Info: return "info";
    }
    return "?";
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number()) return format_number(v.get<double>());
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    return s;
}

// JSON cannot carry nan/inf; they become strings.
json sanitize(json v) {
    if (v.is_number_float() && !std::isfinite(v.get<double>())) return format_number(v.get<double>());
    if (v.is_structured())
        for (auto& x : v) x = sanitize(x);
    return v;
}

}  // namespace

json& Table::add(const std::string& label, RowKind kind, bool pass, json values) {
    if (!values.is_object() || values.size() != columns.size())
        throw std::logic_error("table " + name + ": row does not match the columns");
    for (const auto& c : columns)
        if (!values.contains(c)) throw std::logic_error("table " + name + ": missing column " + c);
    values["label"] = label;
    values["kind"] = to_string(kind);
    values["pass"] = kind == RowKind::Asserted ? pass : true;
    rows.push_back(sanitize(std::move(values)));
    return rows.back();
}

Report::Report(const ExperimentConfig& cfg) : cfg_(cfg) {}

Table& Report::table(const std::string& name, std::vector<std::string> columns) {
    for (auto& t : tables_)
        if (t.name == name) return t;
    tables_.push_back(Table{name, std::move(columns), {}});
    return tables_.back();
}

void Report::grid(const hessian::GridDomain& g) { grids_.push_back(hessian::domain_json(g)); }

void Report::note(const std::string& text) { notes_.push_back(text); }

void Report::plot(const std::string& name, std::vector<std::string> columns, std::vector<std::vector<double>> rows) {
    plots_.push_back(Plot{name, std::move(columns), std::move(rows)});
}

void Report::field(const std::string& name, const hessian::ScalarField& u, json meta) {
    dumps_.push_back(Dump{name, u, std::move(meta)});
}

const std::vector<Failure>& Report::failures() const {
    failures_.clear();
    for (const auto& t : tables_)
        for (const auto& r : t.rows)
            if (r["kind"] == "asserted" && !r["pass"].get<bool>()) {
                std::ostringstream os;
                for (const auto& c : t.columns) os << c << "=" << csv_cell(r[c]) << " ";
                failures_.push_back(Failure{t.name, r["label"].get<std::string>(), os.str()});
            }
    return failures_;
}

json Report::summary() const {
    json j;
    j["experiment"] = to_string(cfg_.experiment);
    j["name"] = cfg_.name;
    j["config"] = cfg_.to_json();
    j["config_hash"] = cfg_.hash();
    json kap = json::object();
    for (int m = 1; m <= cfg_.domain.n; ++m) kap[std::to_string(m)] = hessian::kappa(cfg_.domain.n, m);
    j["kappa"] = kap;
    j["grids"] = grids_;
    json tabs = json::object();
    std::size_t asserted = 0;
    for (const auto& t : tables_) {
        tabs[t.name] = t.rows;
        for (const auto& r : t.rows) asserted += r["kind"] == "asserted";
    }
    j["tables"] = tabs;
    j["notes"] = notes_;
    json fails = json::array();
    for (const auto& f : failures()) fails.push_back({{"table", f.table}, {"label", f.label}, {"detail", f.detail}});
    j["assertions"] = asserted;
    j["failures"] = fails;
    j["status"] = fails.empty() ? "pass" : "fail";
    return j;
}

fs::path Report::write(const fs::path& dir) const {
    const fs::path root = dir / cfg_.name;
    fs::create_directories(root);
    {
        std::ofstream os(root / "summary.json");
        os << summary().dump(2) << '\n';
    }
    for (const auto& t : tables_) {
        std::ofstream os(root / (t.name + ".csv"));
        os << "label,kind,pass";
        for (const auto& c : t.columns) os << ',' << c;
        os << '\n';
        for (const auto& r : t.rows) {
            os << csv_cell(r["label"]) << ',' << csv_cell(r["kind"]) << ',' << csv_cell(r["pass"]);
            for (const auto& c : t.columns) os << ',' << csv_cell(r[c]);
            os << '\n';
        }
    }
    for (const auto& p : plots_) {
        std::ofstream os(root / (p.name + ".dat"));
        os << '#';
        for (const auto& c : p.columns) os << ' ' << c;
        os << '\n';
        for (const auto& row : p.rows) {
            for (std::size_t k = 0; k < row.size(); ++k) os << (k ? " " : "") << format_number(row[k]);
            os << '\n';
        }
    }
    for (const auto& d : dumps_) {
        json meta = d.meta.is_null() ? json::object() : d.meta;
        meta["config_hash"] = cfg_.hash();
        hessian::write_field(root / (d.name + ".bin"), d.field, meta);
    }
    return root;
}

}  // namespace cli
