#include "madlab/types.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "madlab/errors.hpp"

namespace madlab {

std::size_t estimate_tokens(std::string_view text) {
    std::size_t count = 0;
    bool in_token = false;
    for (const char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_token) ++count;
        in_token = !space;
    }
    return count;
}

Transcript::Transcript(int n_agents, int n_rounds) : n_agents_(n_agents), n_rounds_(n_rounds) {
    if (n_agents < 1) throw std::invalid_argument("transcript needs at least one agent");
    if (n_rounds < 0) throw std::invalid_argument("transcript needs n_rounds >= 0");
    const std::size_t cells = static_cast<std::size_t>(n_agents) * (n_rounds + 1);
    cells_.resize(cells);
    filled_.assign(cells, 0);
}

std::size_t Transcript::index(int agent, int round) const {
    if (agent < 1 || agent > n_agents_ || round < 0 || round > n_rounds_)
        throw std::out_of_range("transcript cell (" + std::to_string(agent) + "," +
                                std::to_string(round) + ") out of range");
    return static_cast<std::size_t>(agent - 1) * (n_rounds_ + 1) + round;
}

void Transcript::set(Response response) {
    const std::size_t i = index(response.agent_index, response.round);
    if (filled_[i]) throw Error("transcript cell populated twice");
    cells_[i] = std::move(response);
    filled_[i] = 1;
}

const Response& Transcript::cell(int agent, int round) const {
    const std::size_t i = index(agent, round);
    if (!filled_[i]) throw IncompleteRound("transcript cell (" + std::to_string(agent) + "," +
                                           std::to_string(round) + ") not populated");
    return cells_[i];
}

bool Transcript::filled(int agent, int round) const {
    return filled_[index(agent, round)] != 0;
}

bool Transcript::complete() const {
    for (const char f : filled_)
        if (!f) return false;
    return true;
}

bool Transcript::round_complete(int round) const {
    for (int agent = 1; agent <= n_agents_; ++agent)
        if (!filled(agent, round)) return false;
    return true;
}

const char* BackendSpec::kind() const {
    if (std::holds_alternative<ScriptedSpec>(impl)) return "scripted";
    if (std::holds_alternative<SyntheticSpec>(impl)) return "synthetic";
    return "llm_http";
}

const char* to_string(DebateMode mode) {
    return mode == DebateMode::Conformity ? "conformity" : "anti_conformity";
}

const char* to_string(ContextWindow window) {
    return window == ContextWindow::PreviousRound ? "previous_round" : "full_history";
}

std::optional<DebateMode> debate_mode_from_string(std::string_view s) {
    if (s == "conformity") return DebateMode::Conformity;
    if (s == "anti_conformity") return DebateMode::AntiConformity;
    return std::nullopt;
}

std::optional<ContextWindow> context_window_from_string(std::string_view s) {
    if (s == "previous_round") return ContextWindow::PreviousRound;
    if (s == "full_history") return ContextWindow::FullHistory;
    return std::nullopt;
}

std::vector<std::string> validate_config(const DebateConfig& cfg) {
    std::vector<std::string> errors;
    if (cfg.n_agents < 1) errors.push_back("need at least one agent");
    if (cfg.n_rounds < 0) errors.push_back("n_rounds must be >= 0");
    for (const int agent : cfg.attacked) {
        if (agent < 1 || agent > cfg.n_agents) {
            errors.push_back("attacked index out of range: " + std::to_string(agent));
        }
    }
    const double w[] = {cfg.weights.initial_credit, cfg.weights.transfer_penalty,
                        cfg.weights.transfer_credit, cfg.weights.maintain_credit};
    for (const double v : w) {
        if (!std::isfinite(v) || v < 0.0) {
            errors.push_back("weights must be finite and >= 0");
            break;
        }
    }
    if (!cfg.backends.empty() && cfg.backends.size() != 1 &&
        cfg.backends.size() != static_cast<std::size_t>(cfg.n_agents)) {
        errors.push_back("backends must hold one shared spec or exactly one per agent");
    }
    return errors;
}

}  // namespace madlab
