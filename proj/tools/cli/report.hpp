#pragma once

// Report tree of one experiment: summary.json, CSV tables, gnuplot data files and
// binary field dumps. Nothing time- or host-dependent is written, so serial reruns
// are byte-identical.

#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "hessian/domain.hpp"

namespace cli {

/// Row flag: asserted rows decide the exit status, fitted and info rows do not.
enum class RowKind { Asserted, Fitted, Info };

struct Table {
    std::string name;
    std::vector<std::string> columns;  // after the fixed label, kind, pass columns
    std::vector<nlohmann::json> rows;  // objects keyed by column, plus label/kind/pass

    /// Appends a row; `values` must hold exactly the declared columns.
    nlohmann::json& add(const std::string& label, RowKind kind, bool pass, nlohmann::json values);
};

struct Failure {
    std::string table;
    std::string label;
    std::string detail;
};

class Report {
public:
    explicit Report(const ExperimentConfig& cfg);

    Table& table(const std::string& name, std::vector<std::string> columns);
    void grid(const hessian::GridDomain& g);
    void note(const std::string& text);
    /// Gnuplot-ready columns; written as <name>.dat.
    void plot(const std::string& name, std::vector<std::string> columns, std::vector<std::vector<double>> rows);
    /// Queued field dump, written as <name>.bin with a JSON sidecar.
    void field(const std::string& name, const hessian::ScalarField& u, nlohmann::json meta = {});

    const std::vector<Failure>& failures() const;
    bool ok() const { return failures().empty(); }
    nlohmann::json summary() const;

    /// Writes everything under dir / config name; returns that directory.
    std::filesystem::path write(const std::filesystem::path& dir) const;

private:
    struct Plot {
        std::string name;
        std::vector<std::string> columns;
        std::vector<std::vector<double>> rows;
    };
    struct Dump {
        std::string name;
        hessian::ScalarField field;
        nlohmann::json meta;
    };
    const ExperimentConfig& cfg_;
    std::deque<Table> tables_;
    std::vector<nlohmann::json> grids_;
    std::vector<std::string> notes_;
    std::vector<Plot> plots_;
    std::vector<Dump> dumps_;
    mutable std::vector<Failure> failures_;
};

const char* to_string(RowKind k);

/// Shortest round-trip representation of a double ("nan", "inf" for non-finite).
std::string format_number(double v);

}  // namespace cli
