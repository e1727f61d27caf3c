#include "fslab/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <vector>

#include "fslab/error.hpp"

namespace fslab::report {

namespace {

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string metric_or_na(const nlohmann::json& metrics, const char* key) {
    if (!metrics.contains(key) || metrics.at(key).is_null()) return "n/a";
    return fixed2(metrics.at(key).get<double>());
}

std::string daily_cell(const nlohmann::json& metrics) {
    return metric_or_na(metrics, "daily_return_mean_pct") + " ± " +
           metric_or_na(metrics, "daily_return_std_pct");
}

struct Cell {
    std::string total_return;
    std::string daily;
    std::string sharpe;
};

std::string regime_title(const std::string& kind) {
    if (kind == "test_bull") return "Bull";
    if (kind == "test_bear") return "Bear";
    if (kind == "validation") return "Validation";
    return kind;
}

// Columns align on glyphs, not bytes (the ± in daily-return cells is
// multi-byte UTF-8).
std::size_t display_width(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

std::string render_grid(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows, bool markdown) {
    std::vector<std::size_t> widths(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) widths[c] = display_width(header[c]);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], display_width(row[c]));

    const auto emit_row = [&](const std::vector<std::string>& cells) {
        std::string line;
        if (markdown) line += "| ";
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::string cell = cells[c];
            cell.append(widths[c] - std::min(widths[c], display_width(cell)), ' ');
            line += cell;
            line += markdown ? " | " : "  ";
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        if (markdown && !line.empty() && line.back() != '|') line += ' ';
        return line + "\n";
    };

    std::string out = emit_row(header);
    if (markdown) {
        std::vector<std::string> rule;
        rule.reserve(header.size());
        for (auto w : widths) rule.emplace_back(std::string(w, '-'));
        out += emit_row(rule);
    } else {
        std::size_t total = 0;
        for (auto w : widths) total += w + 2;
        out += std::string(total > 2 ? total - 2 : total, '-') + "\n";
    }
    for (const auto& row : rows) out += emit_row(row);
    return out;
}

}  // namespace

std::string render_table(std::span<const LoadedReport> reports, bool markdown) {
    if (reports.empty()) throw DomainError("no reports to render");

    std::vector<std::string> regimes;        // first-appearance order
    std::vector<std::string> labels;         // first-appearance order
    std::map<std::pair<std::string, std::string>, Cell> cells;

    for (const auto& loaded : reports) {
        const auto& body = loaded.body;
        if (!body.is_object() || !body.contains("metrics") || !body.contains("split") ||
            !body.contains("strategy"))
            throw DomainError("report file " + loaded.path +
                              " is missing metrics, split or strategy");
        const auto& metrics = body.at("metrics");
        if (!metrics.contains("total_return_pct"))
            throw DomainError("report file " + loaded.path + " has no total_return_pct metric");

        std::string label;
        if (body.contains("variant_label"))
            label = body.at("variant_label").get<std::string>();
        else
            label = body.at("strategy").value("label", "?");
        const auto regime = regime_title(body.at("split").value("kind", "?"));

        if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
        if (std::find(regimes.begin(), regimes.end(), regime) == regimes.end())
            regimes.push_back(regime);

        Cell cell;
        cell.total_return = metric_or_na(metrics, "total_return_pct");
        cell.daily = daily_cell(metrics);
        cell.sharpe = metric_or_na(metrics, "sharpe_ratio");
        cells[{label, regime}] = cell;
    }

    std::vector<std::string> header{"Strategy"};
    for (const auto& r : regimes) header.push_back("Total Return % (" + r + ")");
    for (const auto& r : regimes) header.push_back("Daily Return % (" + r + ")");
    for (const auto& r : regimes) header.push_back("Sharpe (" + r + ")");

    std::vector<std::vector<std::string>> rows;
    for (const auto& label : labels) {
        std::vector<std::string> row{label};
        const auto cell_or = [&](const std::string& regime, auto member) -> std::string {
            const auto it = cells.find({label, regime});
            return it == cells.end() ? "-" : it->second.*member;
        };
        for (const auto& r : regimes) row.push_back(cell_or(r, &Cell::total_return));
        for (const auto& r : regimes) row.push_back(cell_or(r, &Cell::daily));
        for (const auto& r : regimes) row.push_back(cell_or(r, &Cell::sharpe));
        rows.push_back(std::move(row));
    }
    return render_grid(header, rows, markdown);
}

std::string render_ablation_table(const nlohmann::json& ablation_result, bool markdown) {
    if (!ablation_result.is_object() || !ablation_result.contains("rows"))
        throw DomainError("not an ablation result document");

    std::vector<std::string> regimes;
    for (const auto& row : ablation_result.at("rows")) {
        for (const auto& [kind, _] : row.at("cells").items()) {
            const auto title = regime_title(kind);
            if (std::find(regimes.begin(), regimes.end(), title) == regimes.end())
                regimes.push_back(title);
        }
    }
    std::sort(regimes.begin(), regimes.end(), [](const std::string& a, const std::string& b) {
        const auto rank = [](const std::string& r) { return r == "Bull" ? 0 : r == "Bear" ? 1 : 2; };
        return rank(a) < rank(b);
    });

    std::vector<std::string> header{"Components"};
    for (const auto& r : regimes) header.push_back("Return % (" + r + ")");
    for (const auto& r : regimes) header.push_back("Sharpe (" + r + ")");

    std::vector<std::vector<std::string>> rows;
    for (const auto& row : ablation_result.at("rows")) {
        std::vector<std::string> cells{row.at("label").get<std::string>()};
        const auto& data = row.at("cells");
        const auto lookup = [&](const std::string& regime, const char* key) -> std::string {
            for (const auto& [kind, metrics] : data.items()) {
                if (regime_title(kind) == regime) return metric_or_na(metrics, key);
            }
            return "-";
        };
        for (const auto& r : regimes) cells.push_back(lookup(r, "total_return_pct"));
        for (const auto& r : regimes) cells.push_back(lookup(r, "sharpe_ratio"));
        rows.push_back(std::move(cells));
    }
    return render_grid(header, rows, markdown);
}

}  // namespace fslab::report
