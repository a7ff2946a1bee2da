import { ApiClient } from "./api";
import { pairwiseDomUi, surveyDomUi } from "./dom";
import { PairwiseSession, runPairwiseFlow } from "./pairwise";
import { browserStore } from "./storage";
import { SurveySession, runSurveyFlow } from "./survey";

// Entry point: ?survey=<id> runs the rating survey, ?pairwise=<id> the
// translation comparison; ?api= overrides the service base URL.
async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app container");
  }
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const store = browserStore();
  const surveyId = params.get("survey");
  const pairwiseId = params.get("pairwise");
  if (surveyId) {
    await runSurveyFlow(new SurveySession(api, surveyId, store), surveyDomUi(root));
  } else if (pairwiseId) {
    const locale = params.get("locale") ?? "et";
    await runPairwiseFlow(new PairwiseSession(api, pairwiseId, store), pairwiseDomUi(root, locale));
  } else {
    root.textContent = "pass ?survey=<id> or ?pairwise=<id>";
  }
}

window.addEventListener("DOMContentLoaded", () => {
  void start();
});
