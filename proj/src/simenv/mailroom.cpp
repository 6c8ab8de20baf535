// Mail client app: three folders of messages with paging, a message view with
// read/archive controls, and a compose screen with a persistent draft.
// Opening a message does not change its read flag; that is an explicit action.
#include <algorithm>
#include <random>

#include "guirl/core/error.hpp"
#include "guirl/simenv/app.hpp"

namespace guirl::simenv {

namespace {

using core::Action;
using core::ActionKind;
using core::SymbolTable;
using core::WidgetKind;
using core::WidgetRecord;

constexpr int kMsgsPerPage = 3;
const char* kFolders[3] = {"inbox", "archive", "sent"};

std::string msg_field(const std::string& folder, int j, const char* part) {
  return folder + ".msg" + std::to_string(j) + "." + part;
}

class MailroomApp : public App {
 public:
  std::string app_id() const override { return "mailroom"; }
  std::string title() const override { return "Mail Room"; }

  void validate_context(const Context& ctx) const override {
    if (ctx.app_id != app_id()) throw ValidationError("context app mismatch");
    const auto& doc = ctx.document_seed;
    auto require = [&](const std::string& f) {
      if (!doc.count(f)) throw ValidationError("mailroom context missing field: " + f);
    };
    for (const char* f : kFolders) {
      require(std::string(f) + ".count");
      const int k = std::stoi(doc.at(std::string(f) + ".count"));
      if (k < 0 || k > 24) throw ValidationError("folder count out of range");
      for (int j = 1; j <= k; ++j) {
        require(msg_field(f, j, "from"));
        require(msg_field(f, j, "subject"));
        require(msg_field(f, j, "body"));
        require(msg_field(f, j, "read"));
      }
    }
    require("draft.to");
    require("draft.subject");
    require("draft.body");
  }

  EnvState initial_state(const Context& ctx) const override {
    validate_context(ctx);
    EnvState s;
    s.app_id = app_id();
    s.screen_stack = {"mailbox"};
    s.document_model = ctx.document_seed;
    return s;
  }

  std::vector<WidgetRecord> render(const EnvState& s) const override {
    std::vector<WidgetRecord> w;
    w.push_back({"label_app", WidgetKind::Label, title(), false, "chrome"});
    const std::string& screen = s.screen();
    if (screen == "mailbox") {
      for (const char* f : kFolders) {
        const int k = s.doc_int(std::string(f) + ".count");
        w.push_back({"item_folder_" + std::string(f), WidgetKind::ListItem,
                     std::string(f) + ": " + std::to_string(k) + " messages", true,
                     "content"});
      }
      w.push_back({"btn_compose", WidgetKind::Button, "Compose", true, "actions"});
    } else if (screen == "folder_view") {
      const std::string f = s.view("folder");
      const int k = s.doc_int(f + ".count");
      const int pages = page_count(k);
      const int p = s.view_int("mpage");
      w.push_back({"label_folder", WidgetKind::Label,
                   f + " page " + std::to_string(p) + " of " + std::to_string(pages) +
                       " (" + std::to_string(k) + " messages)",
                   false, "content"});
      for (int slot = 1; slot <= kMsgsPerPage; ++slot) {
        const int j = (p - 1) * kMsgsPerPage + slot;
        if (j > k) break;
        const bool unread = s.doc(msg_field(f, j, "read")) != "true";
        w.push_back({"item_msg_" + std::to_string(slot), WidgetKind::ListItem,
                     s.doc(msg_field(f, j, "from")) + " - " + s.doc(msg_field(f, j, "subject")) +
                         (unread ? " *" : ""),
                     true, "content"});
      }
      w.push_back({"btn_back", WidgetKind::Button, "Back", true, "nav"});
    } else if (screen == "message_view") {
      const std::string f = s.view("folder");
      const int m = s.view_int("msg");
      w.push_back({"label_msg_head", WidgetKind::Label,
                   "#" + std::to_string(m) + " " + s.doc(msg_field(f, m, "from")) + ": " +
                       s.doc(msg_field(f, m, "subject")),
                   false, "content"});
      w.push_back({"label_msg_body", WidgetKind::Label, s.doc(msg_field(f, m, "body")),
                   false, "content"});
      w.push_back({"label_msg_read", WidgetKind::Label,
                   s.doc(msg_field(f, m, "read")) == "true" ? "read" : "unread", false,
                   "content"});
      w.push_back({"btn_toggle_read", WidgetKind::Button, "Toggle read", true, "actions"});
      w.push_back({"btn_archive_msg", WidgetKind::Button, "Archive", f != "archive",
                   "actions"});
      w.push_back({"btn_back", WidgetKind::Button, "Back", true, "nav"});
    } else if (screen == "compose") {
      w.push_back({"field_to", WidgetKind::TextField, s.doc("draft.to"), true, "content"});
      w.push_back({"field_subject", WidgetKind::TextField, s.doc("draft.subject"), true,
                   "content"});
      w.push_back({"field_body", WidgetKind::TextField, s.doc("draft.body"), true,
                   "content"});
      w.push_back({"btn_send", WidgetKind::Button, "Send", !s.doc("draft.to").empty(),
                   "actions"});
      w.push_back({"btn_discard", WidgetKind::Button, "Discard", true, "actions"});
      w.push_back({"btn_back", WidgetKind::Button, "Back", true, "nav"});
    }
    return w;
  }

  void apply(EnvState& s, const Action& a) const override {
    if (a.kind == ActionKind::Type) {
      if (a.target == "field_to") s.document_model["draft.to"] = a.payload;
      if (a.target == "field_subject") s.document_model["draft.subject"] = a.payload;
      if (a.target == "field_body") s.document_model["draft.body"] = a.payload;
      return;
    }
    if (a.kind == ActionKind::Scroll) {
      if (s.screen() == "folder_view") {
        const int k = s.doc_int(s.view("folder") + ".count");
        s.ui["mpage"] = std::to_string(s.view_int("mpage") % page_count(k) + 1);
      }
      // Scrolling the single-page folder list is a no-op.
      return;
    }
    const std::string& t = a.target;
    if (t.rfind("item_folder_", 0) == 0) {
      s.ui["folder"] = t.substr(12);
      s.ui["mpage"] = "1";
      s.screen_stack.push_back("folder_view");
    } else if (t.rfind("item_msg_", 0) == 0) {
      const int slot = std::stoi(t.substr(9));
      const int m = (s.view_int("mpage") - 1) * kMsgsPerPage + slot;
      s.ui["msg"] = std::to_string(m);
      s.ui["open"] = s.view("folder") + "/" + std::to_string(m);
      s.screen_stack.push_back("message_view");
    } else if (t == "btn_compose") {
      s.screen_stack.push_back("compose");
    } else if (t == "btn_back") {
      const std::string& screen = s.screen();
      if (screen == "folder_view") {
        s.ui.erase("folder");
        s.ui.erase("mpage");
      } else if (screen == "message_view") {
        s.ui.erase("msg");
        s.ui.erase("open");
      }
      s.screen_stack.pop_back();
    } else if (t == "btn_toggle_read") {
      const std::string field = msg_field(s.view("folder"), s.view_int("msg"), "read");
      s.document_model[field] = s.document_model[field] == "true" ? "false" : "true";
    } else if (t == "btn_archive_msg") {
      archive_current(s);
    } else if (t == "btn_send") {
      const int k = s.doc_int("sent.count") + 1;
      s.document_model[msg_field("sent", k, "from")] = "me";
      s.document_model[msg_field("sent", k, "subject")] = s.doc("draft.subject");
      s.document_model[msg_field("sent", k, "body")] = s.doc("draft.body");
      s.document_model[msg_field("sent", k, "read")] = "true";
      s.document_model[msg_field("sent", k, "to")] = s.doc("draft.to");
      s.document_model["sent.count"] = std::to_string(k);
      clear_draft(s);
      s.screen_stack.pop_back();
    } else if (t == "btn_discard") {
      clear_draft(s);
      s.screen_stack.pop_back();
    }
  }

  ScreenGraph screen_graph() const override {
    ScreenGraph g;
    g.app_id = app_id();
    g.root_screen = "mailbox";
    ScreenNode mailbox;
    mailbox.screen_id = "mailbox";
    mailbox.content_bearing = true;
    mailbox.widget_ids = {"label_app", "item_folder_inbox", "item_folder_archive",
                          "item_folder_sent", "btn_compose"};
    mailbox.nav = {{"item_folder_inbox", "folder_view"},
                   {"item_folder_archive", "folder_view"},
                   {"item_folder_sent", "folder_view"},
                   {"btn_compose", "compose"}};
    ScreenNode folder;
    folder.screen_id = "folder_view";
    folder.content_bearing = true;
    folder.widget_ids = {"label_app", "label_folder", "item_msg_1", "item_msg_2",
                         "item_msg_3", "btn_back"};
    folder.nav = {{"item_msg_1", "message_view"},
                  {"item_msg_2", "message_view"},
                  {"item_msg_3", "message_view"},
                  {"btn_back", "<pop>"}};
    ScreenNode message;
    message.screen_id = "message_view";
    message.content_bearing = true;
    message.widget_ids = {"label_app",      "label_msg_head", "label_msg_body",
                          "label_msg_read", "btn_toggle_read", "btn_archive_msg",
                          "btn_back"};
    message.nav = {{"btn_back", "<pop>"}, {"btn_archive_msg", "<pop>"}};
    ScreenNode compose;
    compose.screen_id = "compose";
    compose.content_bearing = true;
    compose.widget_ids = {"label_app", "field_to",    "field_subject", "field_body",
                          "btn_send",  "btn_discard", "btn_back"};
    compose.nav = {{"btn_send", "<pop>"}, {"btn_discard", "<pop>"}, {"btn_back", "<pop>"}};
    g.screens = {std::move(mailbox), std::move(folder), std::move(message),
                 std::move(compose)};
    return g;
  }

  std::vector<Action> review_plan(const SymbolTable& symbols, const Context& ctx,
                                  std::uint64_t seed) const override {
    auto click = [&](const std::string& w) {
      return core::encode_action(symbols, ActionKind::Click, w, "");
    };
    auto scroll = [&](const std::string& w) {
      return core::encode_action(symbols, ActionKind::Scroll, w, "");
    };

    std::vector<std::vector<Action>> tours;
    for (const char* f : kFolders) {
      std::vector<Action> t;
      t.push_back(click("item_folder_" + std::string(f)));
      const int k = std::stoi(ctx.document_seed.at(std::string(f) + ".count"));
      for (int p = 1; p <= page_count(k); ++p) {
        const int on_page = std::min(kMsgsPerPage, k - (p - 1) * kMsgsPerPage);
        for (int slot = 1; slot <= on_page; ++slot) {
          t.push_back(click("item_msg_" + std::to_string(slot)));
          t.push_back(click("btn_back"));
        }
        if (p < page_count(k)) t.push_back(scroll("item_msg_1"));
      }
      t.push_back(click("btn_back"));
      tours.push_back(std::move(t));
    }
    {
      std::vector<Action> t;  // compose draft; leave via back to keep it intact
      t.push_back(click("btn_compose"));
      t.push_back(click("btn_back"));
      tours.push_back(std::move(t));
    }
    std::mt19937_64 rng(seed);
    std::shuffle(tours.begin(), tours.end(), rng);
    std::vector<Action> plan;
    for (auto& t : tours) plan.insert(plan.end(), t.begin(), t.end());
    return plan;
  }

  std::vector<std::string> actionable_widget_ids() const override {
    return {"item_folder_inbox", "item_folder_archive", "item_folder_sent",
            "btn_compose",       "item_msg_1",          "item_msg_2",
            "item_msg_3",        "btn_back",            "btn_toggle_read",
            "btn_archive_msg",   "field_to",            "field_subject",
            "field_body",        "btn_send",            "btn_discard"};
  }

  std::vector<std::string> payload_vocabulary() const override {
    return {"bob",     "carol",  "dave",    "erin",   "team",  "hello",
            "update",  "meeting", "invoice", "report", "thanks", "urgent",
            "lunch",   "notes",  "friday"};
  }

 private:
  static int page_count(int msgs) {
    return std::max(1, (msgs + kMsgsPerPage - 1) / kMsgsPerPage);
  }

  static void clear_draft(EnvState& s) {
    s.document_model["draft.to"] = "";
    s.document_model["draft.subject"] = "";
    s.document_model["draft.body"] = "";
  }

  // Moves the currently open message to the archive folder and returns to the
  // folder view. Later messages shift down to keep indices dense.
  static void archive_current(EnvState& s) {
    const std::string f = s.view("folder");
    const int m = s.view_int("msg");
    const int k = s.doc_int(f + ".count");
    const int a = s.doc_int("archive.count") + 1;
    for (const char* part : {"from", "subject", "body", "read"}) {
      s.document_model[msg_field("archive", a, part)] = s.doc(msg_field(f, m, part));
    }
    s.document_model["archive.count"] = std::to_string(a);
    for (int j = m; j < k; ++j) {
      for (const char* part : {"from", "subject", "body", "read"}) {
        s.document_model[msg_field(f, j, part)] = s.doc(msg_field(f, j + 1, part));
      }
    }
    for (const char* part : {"from", "subject", "body", "read"}) {
      s.document_model.erase(msg_field(f, k, part));
    }
    s.document_model[f + ".count"] = std::to_string(k - 1);
    s.ui.erase("msg");
    s.ui.erase("open");
    s.screen_stack.pop_back();
    // Clamp the page if the removal emptied the last one.
    s.ui["mpage"] = std::to_string(std::min(s.view_int("mpage"), page_count(k - 1)));
  }
};

}  // namespace

std::unique_ptr<App> make_mailroom_app() { return std::make_unique<MailroomApp>(); }

}  // namespace guirl::simenv
