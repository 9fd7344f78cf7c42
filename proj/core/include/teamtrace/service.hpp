#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "teamtrace/config.hpp"
#include "teamtrace/lexicon.hpp"
#include "teamtrace/session.hpp"

namespace httplib {
class Server;
}

namespace teamtrace {

struct ServiceOptions {
    std::filesystem::path lexicon_dir;        // "<name>.lex" files served by name
    SessionConfig base_config;                // overridden per session by the create body
    std::chrono::milliseconds write_timeout{5000};
    std::chrono::milliseconds stream_poll{200};
};

struct SessionDescriptor {
    std::string session_id;
    std::string created_at;  // UTC, ISO 8601
    std::string lexicon;
};

// HTTP front end over any number of independent sessions.
//
//   POST /sessions                          open a session
//   POST /sessions/{id}/utterances          process one utterance
//   GET  /sessions/{id}/events?from=N       NDJSON event stream, live unless follow=0
//   GET  /sessions/{id}/snapshot?format=    json (default) or dot
//   GET  /sessions/{id}/metrics
//   GET  /healthz
class Service {
public:
    explicit Service(ServiceOptions opts);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    // Serves on the calling thread until stop().
    bool listen_after_bind();
    bool listen(const std::string& host, int port);
    void stop();
    bool running() const;

    std::shared_ptr<Session> session(const std::string& id) const;

private:
    struct Entry {
        SessionDescriptor descriptor;
        std::shared_ptr<Session> session;
    };

    void routes();
    std::shared_ptr<const Lexicon> lexicon(const std::string& name);
    std::shared_ptr<Entry> entry(const std::string& id) const;
    Json describe(const Entry& e) const;

    ServiceOptions opts_;
    std::unique_ptr<httplib::Server> server_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::map<std::string, std::shared_ptr<const Lexicon>> lexicons_;
    std::atomic<bool> stopping_{false};
    std::uint64_t next_id_ = 1;
};

}  // namespace teamtrace
