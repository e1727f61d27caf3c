#include "fslab/agents/backend.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "fslab/agents/prompts.hpp"
#include "fslab/error.hpp"

namespace fslab::agents {

namespace {

std::vector<std::string> string_list(const nlohmann::json& arr, const std::string& where) {
    if (!arr.is_array()) throw IoError("scripted fixture: " + where + " must be an array");
    std::vector<std::string> out;
    out.reserve(arr.size());
    for (const auto& item : arr) {
        if (!item.is_string())
            throw IoError("scripted fixture: " + where + " entries must be strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw IoError("file not found: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return ScriptedBackend(text);
}

ScriptedBackend::ScriptedBackend(const std::string& fixture_json) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(fixture_json);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed scripted fixture: ") + e.what());
    }
    if (doc.is_array()) {
        replies_ = string_list(doc, "replies");
        return;
    }
    if (!doc.is_object())
        throw IoError("scripted fixture must be a reply array or an object");
    if (doc.contains("replies")) replies_ = string_list(doc.at("replies"), "replies");
    if (doc.contains("by_agent")) {
        if (!doc.at("by_agent").is_object())
            throw IoError("scripted fixture: by_agent must be an object");
        for (const auto& [agent, arr] : doc.at("by_agent").items())
            by_agent_[agent] = string_list(arr, "by_agent." + agent);
    }
    if (doc.contains("by_digest")) {
        if (!doc.at("by_digest").is_object())
            throw IoError("scripted fixture: by_digest must be an object");
        for (const auto& [digest, reply] : doc.at("by_digest").items()) {
            if (!reply.is_string())
                throw IoError("scripted fixture: by_digest values must be strings");
            by_digest_[digest] = reply.get<std::string>();
        }
    }
    cycle_ = doc.value("cycle", false);
    if (replies_.empty() && by_agent_.empty() && by_digest_.empty())
        throw IoError("scripted fixture has no replies");
}

std::string ScriptedBackend::complete(const ChatRequest& request) {
    ++calls_made_;
    if (!by_digest_.empty()) {
        const auto it = by_digest_.find(prompt_digest(request.user));
        if (it != by_digest_.end()) return it->second;
    }
    const auto take = [this](const std::vector<std::string>& list, std::size_t& cursor,
                             const std::string& what) -> const std::string& {
        if (cursor >= list.size()) {
            if (!cycle_ || list.empty())
                throw BackendError("scripted backend exhausted " + what + " after " +
                                   std::to_string(list.size()) + " replies");
            cursor = 0;
        }
        return list[cursor++];
    };
    if (!request.tag.empty()) {
        const auto it = by_agent_.find(request.tag);
        if (it != by_agent_.end())
            return take(it->second, agent_cursor_[request.tag], "'" + request.tag + "' replies");
    }
    return take(replies_, cursor_, "replies");
}

HttpBackend::HttpBackend(std::string endpoint, std::string model, std::string api_key_env)
    : endpoint_(std::move(endpoint)), model_(std::move(model)),
      api_key_env_(std::move(api_key_env)) {}

std::string HttpBackend::complete(const ChatRequest& request) {
    std::string host = endpoint_;
    std::string path = "/";
    const auto scheme_pos = host.find("://");
    const auto path_pos = host.find('/', scheme_pos == std::string::npos ? 0 : scheme_pos + 3);
    if (path_pos != std::string::npos) {
        path = host.substr(path_pos);
        host = host.substr(0, path_pos);
    }

    nlohmann::json body;
    body["model"] = request.model.empty() ? model_ : request.model;
    body["messages"] = nlohmann::json::array();
    if (!request.system.empty())
        body["messages"].push_back({{"role", "system"}, {"content", request.system}});
    body["messages"].push_back({{"role", "user"}, {"content", request.user}});
    body["temperature"] = request.temperature;

    httplib::Client client(host);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (const char* key = std::getenv(api_key_env_.c_str()); key != nullptr && *key != '\0')
        headers.emplace("Authorization", std::string("Bearer ") + key);

    const auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res)
        throw BackendError("network failure calling " + endpoint_ + ": " +
                           httplib::to_string(res.error()));
    if (res->status == 429) {
        int retry_after = 1;
        if (res->has_header("Retry-After")) {
            try {
                retry_after = std::stoi(res->get_header_value("Retry-After"));
            } catch (const std::exception&) {
            }
        }
        throw RateLimitError("rate limited by " + endpoint_ + " (retry after " +
                                 std::to_string(retry_after) + "s)",
                             retry_after);
    }
    if (res->status != 200)
        throw BackendError("backend returned HTTP " + std::to_string(res->status) + ": " +
                           res->body);

    try {
        const auto doc = nlohmann::json::parse(res->body);
        if (doc.contains("choices") && doc.at("choices").is_array() &&
            !doc.at("choices").empty()) {
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        }
        if (doc.contains("content") && doc.at("content").is_string())
            return doc.at("content").get<std::string>();
        throw BackendError("backend response carries no completion text");
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("unparseable backend response: ") + e.what());
    }
}

}  // namespace fslab::agents
