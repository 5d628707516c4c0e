#pragma once

#include "errlens/eps/catalog.hpp"
#include "errlens/matcher.hpp"
#include "errlens/minilang/ast.hpp"
#include "errlens/minilang/facts.hpp"
#include "errlens/minilang/task_spec.hpp"
#include "errlens/session/clock.hpp"
#include "errlens/session/report.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace errlens::session {

inline constexpr int session_format_version = 1;

/// Path value that selects the catalog compiled into the tool.
inline constexpr std::string_view builtin_catalog = "builtin";

enum class SessionErrorCode
{
    UnknownSession,
    UnknownQuestion,
    UnknownSite,
    Conflict,
    InvalidArgument,
    VersionMismatch,
    HashMismatch,
    StateMismatch,
    Io,
    Corrupt,
};

const char* to_string(SessionErrorCode c);

class SessionError : public std::runtime_error
{
public:
    SessionError(SessionErrorCode code, const std::string& message)
        : std::runtime_error(message)
        , m_code(code)
    {}

    SessionErrorCode code() const noexcept { return m_code; }

private:
    SessionErrorCode m_code;
};

/// Text + label of one input document.
struct InputText
{
    std::string path;
    std::string text;
};

/// The parsed, immutable inputs of an inspection.
class Workspace
{
public:
    /// Parses and validates everything; throws InputError on rejection.
    /// A catalog path equal to `builtin_catalog` selects the shipped catalog.
    static std::shared_ptr<const Workspace> from_texts(InputText program, InputText task, InputText catalog,
        std::optional<InputText> facts = std::nullopt);

    /// Reads the files (SessionError Io when missing) then parses them.
    static std::shared_ptr<const Workspace> load(const std::filesystem::path& program,
        const std::filesystem::path& task, const std::string& catalog,
        const std::optional<std::filesystem::path>& facts = std::nullopt);

    const minilang::Program& program() const { return m_program; }
    const minilang::TaskSpec& task() const { return m_task; }
    const eps::Catalog& catalog() const { return m_catalog; }
    /// Extracted facts, followed by any externally supplied ones.
    const FactSet& facts() const { return m_facts; }
    const std::vector<InputRef>& inputs() const { return m_inputs; }
    const std::string& program_text() const { return m_program.source; }

    MatchContext context() const;

private:
    Workspace() = default;

    minilang::Program m_program;
    minilang::TaskSpec m_task;
    eps::Catalog m_catalog;
    FactSet m_facts;
    std::vector<InputRef> m_inputs;
};

/// Text of input document `path` as it is on disk, or the shipped catalog.
std::string read_input(const std::string& path);

struct AnswerResult
{
    /// False when the submission repeated the recorded answer.
    bool changed = false;
    std::vector<Site> sites;
};

/// One inspector working through one program. All mutations recompute the
/// ranked site list from scratch.
class Session
{
public:
    static Session start(std::shared_ptr<const Workspace> ws, std::string id, const Clock& clock);

    const std::string& id() const { return m_id; }
    const Workspace& workspace() const { return *m_ws; }
    std::int64_t started_wall_ms() const { return m_started_wall_ms; }
    std::string started_at() const { return format_utc(m_started_wall_ms); }

    const std::vector<Site>& sites() const { return m_sites; }
    const Answers& answers() const { return m_answers; }
    const std::vector<DefectRecord>& defects() const { return m_defects; }
    const std::vector<TranscriptEntry>& transcript() const { return m_transcript; }

    /// Unanswered questions of non-dismissed sites, in rank order.
    std::vector<Question> pending_questions() const;

    /// Errors: UnknownQuestion; Conflict when a different yes/no answer is
    /// already recorded and `overwrite` is false.
    AnswerResult submit_answer(const std::string& question_id, Answer answer, bool overwrite = false);

    /// Errors: UnknownSite.
    DefectRecord log_defect(const std::string& description, const std::optional<std::string>& site = std::nullopt);

    /// Dismiss (or restore) a site. Errors: UnknownSite.
    void dismiss(const std::string& site_id, bool dismissed = true);

    Report report(bool include_session = true) const;

    nlohmann::json to_json() const;
    /// Rebuilds a session from its persisted form, re-reading the inputs.
    /// Errors: VersionMismatch, HashMismatch, StateMismatch, Corrupt, Io.
    static Session from_json(const nlohmann::json& j, const Clock& clock);

    /// Writes <store>/<id>.json atomically.
    void save(const std::filesystem::path& store) const;
    static Session load(const std::filesystem::path& file, const Clock& clock);
    static std::filesystem::path file_for(const std::filesystem::path& store, const std::string& id);

    void set_clock(const Clock& clock) { m_clock = &clock; }

private:
    Session() = default;
    void recompute();
    double minutes_now() const;
    const Question* find_question(const std::string& id) const;

    std::shared_ptr<const Workspace> m_ws;
    const Clock* m_clock = nullptr;
    std::string m_id;
    std::int64_t m_started_wall_ms = 0;
    std::int64_t m_started_steady_ns = 0;
    Answers m_answers;
    std::vector<TranscriptEntry> m_transcript;
    std::vector<DefectRecord> m_defects;
    std::vector<Site> m_sites;
    /// Every question any site can ask, by id.
    std::vector<Question> m_questions;
};

/// True for ids safe to use as file names.
bool valid_session_id(std::string_view id);
std::string generate_session_id();

/// A scripted inspection: answers, dismissals and defects with the minute
/// at which each happened. Accepts a bare array of answer bodies too.
struct ReplayEvent
{
    enum class Kind
    {
        Answer,
        Dismiss,
        Defect,
    } kind
        = Kind::Answer;
    double at_minutes = 0.0;
    std::string subject; // question id, site id, or defect description
    Answer answer = Answer::Unknown;
    bool overwrite = false;
    bool dismissed = true;
    std::optional<std::string> site; // defect link
};

/// Throws InputError for malformed scripts.
std::vector<ReplayEvent> parse_replay_script(std::string_view json_text);

/// Applies events in time order, moving `clock` to each event's minute.
void replay(Session& s, const std::vector<ReplayEvent>& events, ManualClock& clock);

} // namespace errlens::session
