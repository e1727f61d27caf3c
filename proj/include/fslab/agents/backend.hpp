#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace fslab::agents {

/// One chat completion request. `tag` is routing metadata (the requesting
/// agent's name); live backends ignore it, the scripted backend may use it
/// to pick a reply list.
struct ChatRequest {
    std::string system;
    std::string user;
    double temperature = 0.0;
    std::string model;
    std::string tag;
};

/// Completion backend contract. Implementations throw BackendError (or
/// RateLimitError) on transport problems; retrying is the caller's job.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual std::string name() const = 0;
};

/// Deterministic backend driven by a JSON fixture. Accepted shapes:
///   ["reply one", "reply two", ...]                 -- consumed by ordinal
///   {"replies": [...], "cycle": true}
///   {"by_agent": {"trade": [...], ...}, "cycle": true}
///   {"by_digest": {"<16-hex prompt digest>": "reply", ...}}
/// Resolution order: a by_digest match on the user text wins, then the
/// tagged request's by_agent list (with its own cursor), then "replies" by
/// ordinal. Without "cycle", running past the end of a list is an error.
/// Identical request sequences always produce identical reply sequences.
class ScriptedBackend final : public LlmBackend {
public:
    static ScriptedBackend from_file(const std::filesystem::path& path);
    /// `fixture_json` is the serialized fixture document.
    explicit ScriptedBackend(const std::string& fixture_json);

    std::string complete(const ChatRequest& request) override;
    std::string name() const override { return "scripted"; }

    std::size_t calls_made() const { return calls_made_; }

private:
    std::vector<std::string> replies_;
    std::map<std::string, std::vector<std::string>> by_agent_;
    std::map<std::string, std::string> by_digest_;
    bool cycle_ = false;
    std::size_t cursor_ = 0;
    std::map<std::string, std::size_t> agent_cursor_;
    std::size_t calls_made_ = 0;
};

/// HTTP chat-completion backend: POST {model, messages, temperature} with a
/// bearer token read from the named environment variable; the reply text is
/// taken from choices[0].message.content.
class HttpBackend final : public LlmBackend {
public:
    HttpBackend(std::string endpoint, std::string model,
                std::string api_key_env = "FSLAB_API_KEY");

    std::string complete(const ChatRequest& request) override;
    std::string name() const override { return "http"; }

private:
    std::string endpoint_;
    std::string model_;
    std::string api_key_env_;
};

}  // namespace fslab::agents
