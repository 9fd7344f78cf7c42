#include "teamtrace/service.hpp"

#include <ctime>
#include <regex>

#include <httplib.h>

#include "teamtrace/errors.hpp"

namespace teamtrace {

namespace {

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(canonical(Json{{"error", message}}), kJson);
}

std::string utc_now() {
    auto t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool valid_lexicon_name(const std::string& name) {
    static const std::regex ok(R"([A-Za-z0-9_][A-Za-z0-9_.-]*)");
    return std::regex_match(name, ok) && name.find("..") == std::string::npos;
}

// Fragments of the graph touched by a batch: ICNs created or joined, edges added.
Json changed_fragments(const EventBatch& batch, const Snapshot& snap) {
    std::set<IcnId> icns;
    Json edges = Json::array();
    for (const auto& e : batch.events) {
        if (e.kind == event_kind::icn_created || e.kind == event_kind::icn_joined ||
            e.kind == event_kind::image_tagged)
            icns.insert(e.payload.at("icn").get<IcnId>());
        if (e.kind == event_kind::edge_added) edges.push_back(e.payload);
    }
    Json nodes = Json::array();
    for (auto id : icns)
        if (const auto* icn = snap.graph.find(id)) nodes.push_back(*icn);
    return Json{{"icns", nodes}, {"edges", edges}};
}

}  // namespace

Service::Service(ServiceOptions opts) : opts_(std::move(opts)), server_(std::make_unique<httplib::Server>()) {
    validate(opts_.base_config);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts_.write_timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts_.write_timeout - secs);
    server_->set_write_timeout(secs.count(), usecs.count());
    routes();
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool Service::listen_after_bind() { return server_->listen_after_bind(); }

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }

void Service::stop() {
    stopping_ = true;
    {
        std::lock_guard lock(mu_);
        for (auto& [id, e] : sessions_) e->session->close();
    }
    if (server_) server_->stop();
}

bool Service::running() const { return server_ && server_->is_running(); }

std::shared_ptr<Session> Service::session(const std::string& id) const {
    auto e = entry(id);
    return e ? e->session : nullptr;
}

std::shared_ptr<Service::Entry> Service::entry(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<const Lexicon> Service::lexicon(const std::string& name) {
    if (!valid_lexicon_name(name)) return nullptr;
    {
        std::lock_guard lock(mu_);
        if (auto it = lexicons_.find(name); it != lexicons_.end()) return it->second;
    }
    auto path = opts_.lexicon_dir / (name + ".lex");
    if (!std::filesystem::is_regular_file(path)) return nullptr;
    auto lex = std::make_shared<const Lexicon>(load_lexicon(path));
    std::lock_guard lock(mu_);
    return lexicons_.emplace(name, std::move(lex)).first->second;
}

Json Service::describe(const Entry& e) const {
    return Json{{"session_id", e.descriptor.session_id},
                {"created_at", e.descriptor.created_at},
                {"lexicon", e.descriptor.lexicon},
                {"problem_statement", e.session->problem_statement()},
                {"utterance_count", e.session->utterance_count()},
                {"last_seq", e.session->last_seq()},
                {"config", e.session->config()}};
}

void Service::routes() {
    auto& srv = *server_;

    srv.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
        std::size_t n = 0;
        {
            std::lock_guard lock(mu_);
            n = sessions_.size();
        }
        res.set_content(canonical(Json{{"status", "ok"}, {"sessions", n}}), kJson);
    });

    srv.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        Json body;
        try {
            body = req.body.empty() ? Json::object() : Json::parse(req.body);
        } catch (const Json::exception& e) {
            return send_error(res, 400, std::string("invalid JSON: ") + e.what());
        }
        if (!body.is_object()) return send_error(res, 400, "body must be an object");
        std::string lex_name = body.value("lexicon", std::string("default"));
        std::string problem;
        if (auto it = body.find("problem_statement"); it != body.end() && !it->is_null()) {
            if (!it->is_string()) return send_error(res, 400, "problem_statement must be a string");
            problem = it->get<std::string>();
        }
        SessionConfig cfg;
        try {
            cfg = config_from_json(body.contains("config") ? body.at("config") : Json(nullptr), opts_.base_config);
        } catch (const Error& e) {
            return send_error(res, 400, e.what());
        }
        std::shared_ptr<const Lexicon> lex;
        try {
            lex = lexicon(lex_name);
        } catch (const Error& e) {
            return send_error(res, 500, std::string("lexicon '") + lex_name + "' is invalid: " + e.what());
        }
        if (!lex) return send_error(res, 404, "unknown lexicon '" + lex_name + "'");

        auto e = std::make_shared<Entry>();
        e->descriptor.created_at = utc_now();
        e->descriptor.lexicon = lex_name;
        e->session = std::make_shared<Session>(cfg, lex, problem);
        {
            std::lock_guard lock(mu_);
            e->descriptor.session_id = "s" + std::to_string(next_id_++);
            sessions_.emplace(e->descriptor.session_id, e);
        }
        res.status = 201;
        res.set_content(canonical(describe(*e)), kJson);
    });

    srv.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto e = entry(req.matches[1]);
        if (!e) return send_error(res, 404, "unknown session");
        res.set_content(canonical(describe(*e)), kJson);
    });

    srv.Post(R"(/sessions/([^/]+)/utterances)", [this](const httplib::Request& req, httplib::Response& res) {
        auto e = entry(req.matches[1]);
        if (!e) return send_error(res, 404, "unknown session");
        Utterance u;
        try {
            u = Json::parse(req.body).get<Utterance>();
        } catch (const std::exception& ex) {
            return send_error(res, 400, std::string("invalid utterance: ") + ex.what());
        }
        if (u.session.empty()) u.session = e->descriptor.session_id;
        auto batch = e->session->process(u);
        auto snap = e->session->snapshot();
        Json out{{"events", batch.events}, {"last_seq", snap->last_seq}};
        if (batch.status == BatchStatus::accepted) {
            out["metrics"] = snap->metrics;
            out["changes"] = changed_fragments(batch, *snap);
            res.status = 200;
        } else {
            out["error"] = batch.message;
            res.status = batch.status == BatchStatus::stale ? 409 : 400;
        }
        res.set_content(canonical(out), kJson);
    });

    srv.Get(R"(/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
        auto e = entry(req.matches[1]);
        if (!e) return send_error(res, 404, "unknown session");
        std::int64_t from = 1;
        if (req.has_param("from")) {
            try {
                from = std::stoll(req.get_param_value("from"));
            } catch (const std::exception&) {
                return send_error(res, 400, "from must be an integer");
            }
        }
        if (from < 1) return send_error(res, 400, "from must be at least 1");
        bool follow = !req.has_param("follow") || req.get_param_value("follow") != "0";
        auto session = e->session;
        auto next = std::make_shared<std::int64_t>(from);
        res.set_chunked_content_provider(
            "application/x-ndjson", [this, session, next, follow](std::size_t, httplib::DataSink& sink) {
                auto events = session->events_from(*next);
                if (events.empty()) {
                    if (!follow || stopping_ || session->closed()) {
                        sink.done();
                        return true;
                    }
                    session->wait_for(*next, opts_.stream_poll);
                    return true;
                }
                std::string chunk;
                for (const auto& ev : events) chunk += canonical(Json(ev)) + "\n";
                if (!sink.write(chunk.data(), chunk.size())) return false;
                *next = events.back().seq + 1;
                return true;
            });
    });

    srv.Get(R"(/sessions/([^/]+)/snapshot)", [this](const httplib::Request& req, httplib::Response& res) {
        auto e = entry(req.matches[1]);
        if (!e) return send_error(res, 404, "unknown session");
        auto format = req.has_param("format") ? req.get_param_value("format") : std::string("json");
        auto snap = e->session->snapshot();
        if (format == "json") return res.set_content(canonical(Json(*snap)), kJson);
        if (format == "dot") return res.set_content(to_dot(snap->graph), "text/vnd.graphviz");
        send_error(res, 400, "format must be json or dot");
    });

    srv.Get(R"(/sessions/([^/]+)/metrics)", [this](const httplib::Request& req, httplib::Response& res) {
        auto e = entry(req.matches[1]);
        if (!e) return send_error(res, 404, "unknown session");
        res.set_content(canonical(Json(e->session->snapshot()->metrics)), kJson);
    });
}

}  // namespace teamtrace
