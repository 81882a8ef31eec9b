"""Verification reports: canonical line-delimited records, a human summary,
and rendered figures alongside the delimited output.

The canonical records.jsonl carries no wall-clock timing so reports are
byte-identical under a fixed seed; timings go to summary.txt.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .suites import Record


@dataclass
class VerificationReport:
    config: dict
    records: list[Record] = field(default_factory=list)
    suite_seconds: dict = field(default_factory=dict)

    def extend(self, records, suite=None, seconds=None):
        self.records.extend(records)
        if suite is not None and seconds is not None:
            self.suite_seconds[suite] = self.suite_seconds.get(suite, 0.0) + seconds

    def sorted_records(self):
        return sorted(self.records, key=lambda r: (r.suite, r.inputs, r.identity))

    @property
    def n_failed(self):
        return sum(1 for r in self.records if r.status != "pass")

    def canonical_lines(self):
        lines = [json.dumps({"config": self.config}, sort_keys=True,
                            default=str)]
        for r in self.sorted_records():
            lines.append(json.dumps(r.as_canonical(), sort_keys=True,
                                    default=str))
        return lines

    def summary_lines(self):
        by_suite: dict[str, list[Record]] = {}
        for r in self.records:
            by_suite.setdefault(r.suite, []).append(r)
        out = [f"conefourier verification summary  (config: {self.config})", ""]
        for suite in sorted(by_suite):
            rs = by_suite[suite]
            bad = [r for r in rs if r.status != "pass"]
            t = self.suite_seconds.get(suite)
            t_str = f"  [{t:.1f}s]" if t is not None else ""
            out.append(f"{suite:10s} {len(rs) - len(bad):4d}/{len(rs):<4d} pass"
                       f"{t_str}")
            for r in bad:
                out.append(f"    {r.status.upper():5s} {r.identity}: "
                           f"{r.anchor}  ({r.delta})")
        out.append("")
        out.append("RESULT: " + ("PASS" if self.n_failed == 0
                                 else f"FAIL ({self.n_failed} records)"))
        return out

    def write(self, out_dir: str, figures: bool = True):
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "records.jsonl"), "w",
                  encoding="utf-8") as fh:
            fh.write("\n".join(self.canonical_lines()) + "\n")
        with open(os.path.join(out_dir, "summary.txt"), "w",
                  encoding="utf-8") as fh:
            fh.write("\n".join(self.summary_lines()) + "\n")
        if figures:
            render_figures(self, out_dir)


def render_figures(report: VerificationReport, out_dir: str):
    """Render the report figures next to the delimited records."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_suite: dict[str, list[Record]] = {}
    for r in report.records:
        by_suite.setdefault(r.suite, []).append(r)

    # pass/fail per suite
    fig, ax = plt.subplots(figsize=(6, 3))
    suites = sorted(by_suite)
    npass = [sum(1 for r in by_suite[s] if r.status == "pass") for s in suites]
    nfail = [len(by_suite[s]) - k for s, k in zip(suites, npass)]
    ax.bar(suites, npass, color="#2a7", label="pass")
    ax.bar(suites, nfail, bottom=npass, color="#c33", label="fail")
    ax.set_ylabel("identity checks")
    ax.legend(frameon=False)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "fig_suites.png"), dpi=150)
    plt.close(fig)

    # normalized Radon transform decay statistic |R-hat(f)(xw)| |x|^{n-1}
    curves = []
    for r in report.records:
        if "decay_curve" in r.diagnostics:
            curves.append((r.identity, r.diagnostics["decay_curve"]))
    if curves:
        fig, ax = plt.subplots(figsize=(6, 3.2))
        for name, ys in curves:
            ax.plot(range(len(ys)), ys, marker="o", ms=3, label=name)
        ax.set_xlabel("j  (|x| = q^j)")
        ax.set_ylabel("|R-hat(f)(xw)| |x|^{n-1}")
        ax.legend(frameon=False, fontsize=7)
        ax.spines["right"].set_visible(False)
        ax.spines["top"].set_visible(False)
        fig.tight_layout()
        fig.savefig(os.path.join(out_dir, "fig_hat_decay.png"), dpi=150)
        plt.close(fig)

    # radon profile sketch if the radon suite stored one
    profs = [r for r in report.records if "profile_shells" in r.diagnostics]
    if profs:
        fig, ax = plt.subplots(figsize=(6, 3.2))
        for r in profs:
            sh = r.diagnostics["profile_shells"]
            xs = [int(k) for k in sh]
            ys = [sh[k] for k in sh]
            ax.step(xs, ys, where="mid", label=r.identity)
        ax.set_xlabel("shell v(t)")
        ax.set_ylabel("|R(t)(f)(w)|")
        ax.legend(frameon=False, fontsize=7)
        ax.spines["right"].set_visible(False)
        ax.spines["top"].set_visible(False)
        fig.tight_layout()
        fig.savefig(os.path.join(out_dir, "fig_radon_profile.png"), dpi=150)
        plt.close(fig)
