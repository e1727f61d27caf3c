#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace fslab::agents {

enum class AgentKind {
    statistics,
    fact,
    subjectivity,
    fact_reasoning,
    subjectivity_reasoning,
    trade,
    reflection,
};

std::string_view to_string(AgentKind kind);
AgentKind agent_kind_from_string(std::string_view name);

struct PromptTemplate {
    AgentKind kind = AgentKind::statistics;
    std::string text;  // with {placeholder} slots
};

/// Substitutes every {name} slot from `context`, verbatim and in one pass
/// (substituted values are never re-scanned). An unbound placeholder is a
/// DomainError naming the placeholder.
std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& context);

/// Like render_prompt, but first drops whole template lines whose
/// "*_report" placeholder is absent from the context. This is how a
/// disabled agent's labeled section disappears from downstream prompts
/// without touching any other byte.
std::string render_prompt_dropping_missing_reports(
    const PromptTemplate& tmpl, const std::map<std::string, std::string>& context);

/// 64-bit FNV-1a of the text, as 16 hex characters. Used for transcript
/// digests and digest-keyed reply fixtures.
std::string prompt_digest(std::string_view text);

/// The seven per-agent templates. The built-in set is compiled in and kept
/// byte-identical to the files under prompts/, which exist so the texts can
/// be reviewed and diffed without a build.
class PromptLibrary {
public:
    static PromptLibrary builtin();
    static PromptLibrary from_directory(const std::filesystem::path& dir);

    const PromptTemplate& get(AgentKind kind) const;

private:
    std::map<AgentKind, PromptTemplate> templates_;
};

}  // namespace fslab::agents
