#include "madlab/http_agent.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "madlab/errors.hpp"

namespace madlab {

namespace {

using nlohmann::json;

enum class FailureKind { None, Transport, Timeout, Http, Malformed };

bool is_timeout(httplib::Error err) {
    return err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
           err == httplib::Error::Write;
}

}  // namespace

Response llm_respond(const LlmHttpSpec& spec, const PromptBundle& prompt, TaskKind kind) {
    const json body = {
        {"model", spec.model},
        {"messages",
         json::array({{{"role", "system"}, {"content", prompt.system_text}},
                      {{"role", "user"}, {"content", prompt.user_text}}})},
    };
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(spec.api_key_env.c_str()); key != nullptr && *key != '\0')
        headers.emplace("Authorization", std::string("Bearer ") + key);

    FailureKind failure = FailureKind::Transport;
    int last_status = 0;
    std::string last_error = "no attempt made";

    for (int attempt = 0; attempt <= spec.max_retries; ++attempt) {
        if (attempt > 0) {
            const auto backoff = std::chrono::milliseconds(spec.backoff_ms) * (1 << (attempt - 1));
            std::this_thread::sleep_for(backoff);
        }

        httplib::Client client(spec.endpoint);
        client.set_connection_timeout(spec.timeout_s, 0);
        client.set_read_timeout(spec.timeout_s, 0);
        client.set_write_timeout(spec.timeout_s, 0);

        auto res = client.Post(spec.path, headers, payload, "application/json");
        if (!res) {
            failure = is_timeout(res.error()) ? FailureKind::Timeout : FailureKind::Transport;
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            failure = FailureKind::Http;
            last_status = res->status;
            last_error = "http status " + std::to_string(res->status);
            continue;
        }

        const json reply = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
        if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
            reply["choices"].empty() || !reply["choices"][0].contains("message") ||
            !reply["choices"][0]["message"].contains("content") ||
            !reply["choices"][0]["message"]["content"].is_string()) {
            failure = FailureKind::Malformed;
            last_error = "response is not a chat completion";
            continue;
        }

        Response out;
        out.raw_text = reply["choices"][0]["message"]["content"].get<std::string>();
        out.answer = normalize_answer(out.raw_text, kind);
        const auto usage = reply.find("usage");
        if (usage != reply.end() && usage->contains("completion_tokens") &&
            (*usage)["completion_tokens"].is_number_unsigned()) {
            out.token_count = (*usage)["completion_tokens"].get<std::size_t>();
        } else {
            out.token_count = std::max<std::size_t>(1, estimate_tokens(out.raw_text));
            out.token_count_estimated = true;
        }
        return out;
    }

    switch (failure) {
        case FailureKind::Http: throw HttpError(last_status);
        case FailureKind::Timeout: throw TimeoutError(last_error);
        case FailureKind::Malformed: throw MalformedResponse(last_error);
        default: throw Error("transport failure: " + last_error);
    }
}

Response LlmHttpAgent::respond(const PromptBundle& prompt, const AgentCall& call) const {
    Response out = llm_respond(spec_, prompt, call.task->kind);
    out.agent_index = call.agent_index;
    out.round = call.round;
    return out;
}

}  // namespace madlab
