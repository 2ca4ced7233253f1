#!/usr/bin/env python3
"""Writes the replay transcripts under transcripts/. Rerun after editing."""
import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent
OUT = HERE / "transcripts"

S1113_OPT = """void s1113_opt(int iters, float a[LEN_1D], float b[LEN_1D]) {
    for (int nl = 0; nl < 2 * iters; nl++){
        int mid = LEN_1D / 2;
        float temp = a[mid];
        for (int i = 0; i < mid; i++)
            a[i] = temp + b[i];
        a[mid] = temp + b[mid];
        temp = a[mid];
        for (int i = mid+1; i < LEN_1D; i++)
            a[i] = temp + b[i];
    }
}"""

S212_BROKEN = """void s212_opt(int iters, float a[LEN_1D], float b[LEN_1D], float c[LEN_1D], float d[LEN_1D]) {
    for (int nl = 0; nl < iters; nl++) {
        for (int i = 0; i < LEN_1D - 1; i++)
            b[i] += a[i + 1] * d[i]
        for (int i = 0; i < LEN_1D - 1; i++)
            a[i] *= c[i];
    }
}"""

S212_SPLIT = """void s212_opt(int iters, float a[LEN_1D], float b[LEN_1D], float c[LEN_1D], float d[LEN_1D]) {
    for (int nl = 0; nl < iters; nl++) {
        for (int i = 0; i < LEN_1D - 1; i++)
            b[i] += a[i + 1] * d[i];
        for (int i = 0; i < LEN_1D - 1; i++)
            a[i] *= c[i];
    }
}"""

S442_MASK = """void s442_opt(int iters, float a[LEN_1D], float b[LEN_1D], float c[LEN_1D], float d[LEN_1D], float e[LEN_1D],
              int indx[LEN_1D]) {
    for (int nl = 0; nl < iters / 2; nl++)
        for (int i = 0; i < LEN_1D; i++) {
            int k = indx[i];
            a[i] += (float)(k == 1) * (b[i] * b[i]) + (float)(k == 2) * (c[i] * c[i])
                  + (float)(k == 3) * (d[i] * d[i]) + (float)(k != 1 && k != 2 && k != 3) * (e[i] * e[i]);
        }
}"""

S481_HOISTED = """void s481_opt(int iters, float a[LEN_1D], float b[LEN_1D], float c[LEN_1D], float d[LEN_1D]) {
    for (int nl = 0; nl < iters; nl++){
        int early_exit = 0;
        for (int i = 0; i< LEN_1D; i++)
            if (d[i] < (float)0.){
                early_exit = 1;
                break;
            }
        if (early_exit) return;
        for (int i = 0; i < LEN_1D; i++)
            a[i] += b[i] * c[i];
    }
}"""

SET_POINTS_SPLIT = """void set_points_opt(float dst[DIV_MAX + 1], int src[DIV_MAX + 1], int divs[DIV_MAX], int divCount, int srcFixed,
                    int dstLen, float scale, int isScalable) {
    int srcDelta[DIV_MAX];
    float dstDelta[DIV_MAX];
    int isScalableArray[DIV_MAX];
    for (int i = 0; i < divCount; i++){
        src[i + 1] = divs[i];
        srcDelta[i] = src[i+1] - src[i];
        if (srcFixed <= dstLen){
            dstDelta[i]=isScalable?scale*srcDelta[i]:srcDelta[i];
        } else {
            dstDelta[i] = isScalable ?0.0f : scale * srcDelta[i];
        }
        isScalableArray[i] = isScalable;
        isScalable = !isScalable;
    }
    for (int i = 0; i < divCount; i++)
        dst[i + 1] = dst[i] + dstDelta[i];
}"""

MALFORMED = [
    "I think the loop can be split in two, but I need to look at the dependence first.",
    "```c\nvoid s241_opt(void) {}\n```",
    "// VECTRANS_BEGIN\nvoid s241_opt(int iters) {}\n",
    "void s241_opt(int iters) {}\n// VECTRANS_END",
    "// VECTRANS_BEGIN void s241_opt(int iters) {} // VECTRANS_END",
    "// VECTRANS_BEGIN\n\n// VECTRANS_END",
    "",
    "// VECTRANS_END\nvoid s241_opt(int iters) {}\n// VECTRANS_BEGIN",
    "Here is the result:\n/* VECTRANS_BEGIN */\nvoid s241_opt(int iters) {}\n/* VECTRANS_END */",
    "// vectrans_begin\nvoid s241_opt(int iters) {}\n// vectrans_end",
]


def code(body, lead="Split the loop so each part has no carried dependence."):
    return f"{lead}\n\n// VECTRANS_BEGIN\n```c\n{body}\n```\n// VECTRANS_END\n"


def refine(case, text, usage_in=1800, usage_out=420):
    return {"case_id": case, "expected_prompt_kind": "Refine", "response_text": text,
            "usage_in": usage_in, "usage_out": usage_out}


def review(case, verdict="The candidate looks equivalent and the loops have no carried dependence."):
    text = ("1. Lexical: identifiers are spelled consistently.\n2. Syntax: the function is well formed.\n"
            "3. Semantics: " + verdict + "\n4. Vectorization: both loops are simple counted loops.\nVERDICT: ok")
    return {"case_id": case, "expected_prompt_kind": "SelfFeedback", "response_text": text,
            "usage_in": 900, "usage_out": 160}


def s1113_entries():
    return [refine("s1113", code(S1113_OPT, "Split at LEN_1D/2 and keep a[LEN_1D/2] in a temporary.")),
            review("s1113")]


def corpus_entries():
    e = s1113_entries()
    e += [refine("s212", code(S212_BROKEN, "Reorder the two statements into separate loops.")), review("s212"),
          refine("s212", code(S212_SPLIT, "Add the missing semicolon.")), review("s212")]
    e += [refine("s442", code(S442_MASK, "Replace the switch with arithmetic masks.")), review("s442")]
    e += [refine("s481", code(S481_HOISTED, "Hoist the negative check out of the update loop.")),
          review("s481", "the early exit is evaluated before the updates."),
          refine("s481", "The early return makes the trip count unknowable, so the loop is left as is.\n"
                          "// VECTRANS_NO_BENEFIT: the early exit depends on d[i] and cannot be vectorized profitably\n")]
    e += [refine("set_points", code(SET_POINTS_SPLIT, "Buffer the deltas and accumulate in a second loop.")),
          review("set_points"),
          refine("set_points", "The code is already optimized.\n// VECTRANS_DONE\n", 1700, 40),
          refine("set_points", "No further change is needed.\n// VECTRANS_DONE\n", 1700, 40)]
    e += [refine("s241", MALFORMED[i % len(MALFORMED)], 1500, 200) for i in range(20)]
    return e


def malformed_entries():
    return [{"expected_prompt_kind": "Refine", "response_text": MALFORMED[i % len(MALFORMED)],
             "usage_in": 1500, "usage_out": 200} for i in range(20)]


def write(name, entries):
    doc = {"schema": "vectrans-transcript/1", "entries": entries}
    (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    write("s1113.transcript.json", s1113_entries())
    write("fixture_corpus.transcript.json", corpus_entries())
    write("malformed20.transcript.json", malformed_entries())
