// Slide editor app: a deck of titled slides with a thumbnail browser, a setup
// screen (theme, add/remove slides) and an explicit save action. Edits mark
// the document modified; the theme field is locked while unsaved edits exist.
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

constexpr int kMaxSlides = 8;
constexpr int kThumbsPerPage = 4;

std::string slide_field(int i, const char* part) {
  return "slide" + std::to_string(i) + "." + part;
}

class SlidedeckApp : public App {
 public:
  std::string app_id() const override { return "slidedeck"; }
  std::string title() const override { return "Slide Editor"; }

  void validate_context(const Context& ctx) const override {
    if (ctx.app_id != app_id()) throw ValidationError("context app mismatch");
    const auto& doc = ctx.document_seed;
    auto require = [&](const std::string& f) {
      if (!doc.count(f)) throw ValidationError("slidedeck context missing field: " + f);
    };
    require("slide_count");
    const int n = std::stoi(doc.at("slide_count"));
    if (n < 1 || n > kMaxSlides) throw ValidationError("slide_count out of range");
    for (int i = 1; i <= n; ++i) {
      require(slide_field(i, "title"));
      require(slide_field(i, "body"));
    }
    require("theme");
    require("saved");
  }

  EnvState initial_state(const Context& ctx) const override {
    validate_context(ctx);
    EnvState s;
    s.app_id = app_id();
    s.screen_stack = {"editor"};
    s.document_model = ctx.document_seed;
    s.ui["cur"] = "1";
    s.ui["tpage"] = "1";
    return s;
  }

  std::vector<WidgetRecord> render(const EnvState& s) const override {
    std::vector<WidgetRecord> w;
    w.push_back({"label_app", WidgetKind::Label, title(), false, "chrome"});
    const int n = s.doc_int("slide_count");
    const int cur = s.view_int("cur");
    const std::string& screen = s.screen();
    if (screen == "editor") {
      w.push_back({"label_slide_pos", WidgetKind::Label,
                   "Slide " + std::to_string(cur) + " of " + std::to_string(n), false,
                   "content"});
      w.push_back({"field_title", WidgetKind::TextField, s.doc(slide_field(cur, "title")),
                   true, "content"});
      w.push_back({"field_body", WidgetKind::TextField, s.doc(slide_field(cur, "body")),
                   true, "content"});
      w.push_back({"label_saved", WidgetKind::Label,
                   s.doc("saved") == "true" ? "saved" : "modified", false, "content"});
      w.push_back({"btn_save", WidgetKind::Button, "Save", true, "actions"});
      w.push_back({"btn_prev_slide", WidgetKind::Button, "Previous slide", cur > 1, "nav"});
      w.push_back({"btn_next_slide", WidgetKind::Button, "Next slide", cur < n, "nav"});
      w.push_back({"menu_slides", WidgetKind::Menu, "Slides", true, "nav"});
      w.push_back({"menu_setup", WidgetKind::Menu, "Setup", true, "nav"});
    } else if (screen == "slide_list") {
      const int pages = page_count(n);
      const int p = s.view_int("tpage");
      w.push_back({"label_page", WidgetKind::Label,
                   "Thumbnails page " + std::to_string(p) + " of " + std::to_string(pages),
                   false, "content"});
      for (int i = (p - 1) * kThumbsPerPage + 1; i <= std::min(n, p * kThumbsPerPage); ++i) {
        w.push_back({"item_slide_" + std::to_string(i), WidgetKind::ListItem,
                     std::to_string(i) + ": " + s.doc(slide_field(i, "title")), true,
                     "content"});
      }
      w.push_back({"btn_back", WidgetKind::Button, "Back", true, "nav"});
    } else if (screen == "setup") {
      w.push_back({"label_theme", WidgetKind::Label, "Theme: " + s.doc("theme"), false,
                   "content"});
      w.push_back({"field_theme", WidgetKind::TextField, s.doc("theme"),
                   s.doc("saved") == "true", "content"});
      w.push_back({"btn_add_slide", WidgetKind::Button, "Add slide", n < kMaxSlides,
                   "actions"});
      w.push_back({"btn_del_slide", WidgetKind::Button, "Remove last slide", n > 1,
                   "actions"});
      w.push_back({"btn_back", WidgetKind::Button, "Back", true, "nav"});
    }
    return w;
  }

  void apply(EnvState& s, const Action& a) const override {
    const int n = s.doc_int("slide_count");
    const int cur = s.view_int("cur");
    if (a.kind == ActionKind::Type) {
      if (a.target == "field_title") {
        s.document_model[slide_field(cur, "title")] = a.payload;
      } else if (a.target == "field_body") {
        s.document_model[slide_field(cur, "body")] = a.payload;
      } else if (a.target == "field_theme") {
        s.document_model["theme"] = a.payload;
      }
      s.document_model["saved"] = "false";
      return;
    }
    if (a.kind == ActionKind::Scroll) {
      // Any thumbnail scroll advances to the next page, wrapping around.
      const int pages = page_count(n);
      s.ui["tpage"] = std::to_string(s.view_int("tpage") % pages + 1);
      return;
    }
    // Click.
    const std::string& t = a.target;
    if (t == "btn_save") {
      s.document_model["saved"] = "true";
    } else if (t == "btn_prev_slide") {
      s.ui["cur"] = std::to_string(cur - 1);
    } else if (t == "btn_next_slide") {
      s.ui["cur"] = std::to_string(cur + 1);
    } else if (t == "menu_slides") {
      s.screen_stack.push_back("slide_list");
      s.ui["tpage"] = "1";
    } else if (t == "menu_setup") {
      s.screen_stack.push_back("setup");
    } else if (t == "btn_back") {
      s.screen_stack.pop_back();
    } else if (t == "btn_add_slide") {
      const int m = n + 1;
      s.document_model["slide_count"] = std::to_string(m);
      s.document_model[slide_field(m, "title")] = "Untitled";
      s.document_model[slide_field(m, "body")] = "";
      s.document_model["saved"] = "false";
    } else if (t == "btn_del_slide") {
      s.document_model.erase(slide_field(n, "title"));
      s.document_model.erase(slide_field(n, "body"));
      s.document_model["slide_count"] = std::to_string(n - 1);
      if (cur >= n) s.ui["cur"] = std::to_string(n - 1);
      s.document_model["saved"] = "false";
    } else if (t.rfind("item_slide_", 0) == 0) {
      s.ui["cur"] = t.substr(11);
      s.screen_stack.pop_back();
    }
  }

  ScreenGraph screen_graph() const override {
    ScreenGraph g;
    g.app_id = app_id();
    g.root_screen = "editor";
    ScreenNode editor;
    editor.screen_id = "editor";
    editor.content_bearing = true;
    editor.widget_ids = {"label_app",  "label_slide_pos", "field_title",
                         "field_body", "label_saved",     "btn_save",
                         "btn_prev_slide", "btn_next_slide", "menu_slides", "menu_setup"};
    editor.nav = {{"menu_slides", "slide_list"}, {"menu_setup", "setup"}};
    ScreenNode list;
    list.screen_id = "slide_list";
    list.content_bearing = true;
    list.widget_ids = {"label_app", "label_page", "btn_back"};
    for (int i = 1; i <= kMaxSlides; ++i) {
      list.widget_ids.push_back("item_slide_" + std::to_string(i));
      list.nav["item_slide_" + std::to_string(i)] = "<pop>";
    }
    list.nav["btn_back"] = "<pop>";
    ScreenNode setup;
    setup.screen_id = "setup";
    setup.content_bearing = true;
    setup.widget_ids = {"label_app",     "label_theme",   "field_theme",
                        "btn_add_slide", "btn_del_slide", "btn_back"};
    setup.nav = {{"btn_back", "<pop>"}};
    g.screens = {std::move(editor), std::move(list), std::move(setup)};
    return g;
  }

  std::vector<Action> review_plan(const SymbolTable& symbols, const Context& ctx,
                                  std::uint64_t seed) const override {
    const int n = std::stoi(ctx.document_seed.at("slide_count"));
    auto click = [&](const std::string& w) {
      return core::encode_action(symbols, ActionKind::Click, w, "");
    };
    auto scroll = [&](const std::string& w) {
      return core::encode_action(symbols, ActionKind::Scroll, w, "");
    };

    // Three read-only tours; the seed permutes their order.
    std::vector<std::vector<Action>> tours;
    {
      std::vector<Action> t;  // thumbnail browser, every page
      t.push_back(click("menu_slides"));
      for (int p = 1; p < page_count(n); ++p) {
        t.push_back(scroll("item_slide_" + std::to_string((p - 1) * kThumbsPerPage + 1)));
      }
      t.push_back(click("btn_back"));
      tours.push_back(std::move(t));
    }
    {
      std::vector<Action> t;  // walk every slide and return to the first
      for (int i = 2; i <= n; ++i) t.push_back(click("btn_next_slide"));
      for (int i = n; i >= 2; --i) t.push_back(click("btn_prev_slide"));
      tours.push_back(std::move(t));
    }
    {
      std::vector<Action> t;  // setup screen
      t.push_back(click("menu_setup"));
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
    std::vector<std::string> ids = {"field_title", "field_body",  "field_theme",
                                    "btn_save",    "btn_prev_slide", "btn_next_slide",
                                    "menu_slides", "menu_setup",  "btn_back",
                                    "btn_add_slide", "btn_del_slide"};
    for (int i = 1; i <= kMaxSlides; ++i) ids.push_back("item_slide_" + std::to_string(i));
    return ids;
  }

  std::vector<std::string> payload_vocabulary() const override {
    return {"Alpha", "Beta",   "Gamma",  "Delta",   "Omega", "Launch",
            "Plan",  "Review", "Budget", "Summary", "Roadmap", "Notes",
            "Draft", "Final",  "Dark",   "Light",   "Classic"};
  }

 private:
  static int page_count(int slides) { return (slides + kThumbsPerPage - 1) / kThumbsPerPage; }
};

}  // namespace

std::unique_ptr<App> make_slidedeck_app() { return std::make_unique<SlidedeckApp>(); }

}  // namespace guirl::simenv
