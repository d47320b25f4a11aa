#include "era/report.hpp"

#include <json.hpp>

namespace era {

std::string format_report(const std::string& scenario_path, const Trace& trace) {
    std::string out;
    out += "schema 1\n";
    out += "scenario " + scenario_path + "\n";
    out += "strategy " + std::string(strategy_name(trace.strategy)) + "\n";
    out += "seed " + std::to_string(trace.seed) + "\n";
    for (const auto& [id, summary] : trace.finals) {
        out += "replica " + id.name + "\n";
        out += "  events " + std::to_string(summary.event_count) + "\n";
        out += "  finalized-prefix " + std::to_string(summary.finalized_prefix_len) + "\n";
        out += "  active-node " +
               (summary.active_node ? summary.active_node->name : std::string("none")) + "\n";
        for (const auto& [user, role] : summary.state.roles) {
            out += "  role " + user.name + " " + std::string(role_name(role)) + "\n";
        }
        for (const auto& rejected : summary.state.rejected) {
            out += "  rejected " + rejected.hex() + "\n";
        }
        for (const auto& e : summary.backdate_evidence) {
            out += "  BACKDATE " + e.sender.name + " " + e.event_a.hex() + " " + e.event_b.hex() +
                   "\n";
        }
        for (const auto& e : summary.misbehavior) {
            out += "  MISBEHAVIOR " + e.sender.name + " " + e.event_a.hex() + " " +
                   e.event_b.hex() + "\n";
        }
        for (const auto& d : summary.drops) {
            out += "  dropped " + d.claimed_id.hex() + " " +
                   std::string(drop_reason_name(d.reason)) + "\n";
        }
    }
    out += "assertions\n";
    for (const auto& a : trace.assertions) {
        out += std::string("  ") + (a.passed ? "PASS" : "FAIL") + " line " +
               std::to_string(a.line) + ": " + a.description;
        if (!a.passed && !a.detail.empty()) out += " (" + a.detail + ")";
        out += "\n";
    }
    out += std::string("result ") + (trace.all_passed() ? "PASS" : "FAIL") + "\n";
    return out;
}

std::string format_report_json(const std::string& scenario_path, const Trace& trace) {
    nlohmann::ordered_json root;
    root["schema"] = 1;
    root["scenario"] = scenario_path;
    root["strategy"] = std::string(strategy_name(trace.strategy));
    root["seed"] = trace.seed;
    nlohmann::ordered_json replicas = nlohmann::ordered_json::object();
    for (const auto& [id, summary] : trace.finals) {
        nlohmann::ordered_json r;
        r["events"] = summary.event_count;
        r["finalized_prefix"] = summary.finalized_prefix_len;
        r["active_node"] = summary.active_node ? nlohmann::ordered_json(summary.active_node->name)
                                               : nlohmann::ordered_json(nullptr);
        nlohmann::ordered_json roles = nlohmann::ordered_json::object();
        for (const auto& [user, role] : summary.state.roles) {
            roles[user.name] = std::string(role_name(role));
        }
        r["roles"] = std::move(roles);
        nlohmann::ordered_json rejected = nlohmann::ordered_json::array();
        for (const auto& e : summary.state.rejected) rejected.push_back(e.hex());
        r["rejected"] = std::move(rejected);
        auto evidence_json = [](const std::vector<BackdateEvidence>& list) {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (const auto& e : list) {
                arr.push_back({{"sender", e.sender.name},
                               {"event_a", e.event_a.hex()},
                               {"event_b", e.event_b.hex()}});
            }
            return arr;
        };
        r["backdate_evidence"] = evidence_json(summary.backdate_evidence);
        r["misbehavior"] = evidence_json(summary.misbehavior);
        replicas[id.name] = std::move(r);
    }
    root["replicas"] = std::move(replicas);
    nlohmann::ordered_json assertions = nlohmann::ordered_json::array();
    for (const auto& a : trace.assertions) {
        assertions.push_back({{"line", a.line},
                              {"description", a.description},
                              {"passed", a.passed},
                              {"detail", a.detail}});
    }
    root["assertions"] = std::move(assertions);
    root["result"] = trace.all_passed() ? "PASS" : "FAIL";
    return root.dump(2) + "\n";
}

}  // namespace era
