#pragma once

#include <stdexcept>
#include <string>

namespace madlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct CorpusError : Error {
    using Error::Error;
};

// Every cell of the transcript normalized to None; the debate produced
// nothing decidable. Callers record the task as incorrect.
struct AllAnswersNone : Error {
    AllAnswersNone() : Error("all answers in the transcript are None") {}
};

struct IncompleteRound : Error {
    using Error::Error;
};

struct ScriptExhausted : Error {
    using Error::Error;
};

struct BackendFailure : Error {
    BackendFailure(int agent, int round, const std::string& why)
        : Error("agent " + std::to_string(agent) + " round " + std::to_string(round) + ": " + why),
          agent(agent),
          round(round) {}
    int agent;
    int round;
};

struct HttpError : Error {
    explicit HttpError(int status)
        : Error("http status " + std::to_string(status)), status(status) {}
    int status;
};

struct TimeoutError : Error {
    using Error::Error;
};

struct MalformedResponse : Error {
    using Error::Error;
};

struct DegenerateModel : Error {
    using Error::Error;
};

struct EmptyResultSet : Error {
    EmptyResultSet() : Error("no results to aggregate") {}
};

}  // namespace madlab
