"""Figures written next to the CSV outputs when a command runs with ``--plot``."""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

GOLDEN = (math.sqrt(5) - 1.0) / 2.0
CASE_COLOURS = {"I": "tab:blue", "II": "tab:cyan", "III": "tab:green", "IV": "tab:orange",
                "V": "tab:red", "VI": "tab:purple", "boundary": "0.5", "inapplicable": "0.8"}


def _figure(width=6.0, height=None):
    fig, ax = plt.subplots(figsize=(width, height or width * GOLDEN))
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_trace(trace, path, title=""):
    """Weighted and plain H_s norms against t on a log scale."""
    fig, ax = _figure()
    ax.semilogy(trace.t, trace.norms_l2, label="L2")
    ax.semilogy(trace.t, trace.norms_hs, label=f"H_{trace.s:g}")
    ax.semilogy(trace.t, trace.weighted, "--", label=f"e^({trace.gamma:g} t) H_{trace.s:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.set_title(title)
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_bound_report(report, path):
    fig, ax = _figure()
    ax.plot(report.t, report.ratio, "o-")
    ax.set_xlabel("t")
    ax.set_ylabel("integral / bound")
    ax.set_title(f"{report.kernel}, a={report.a:g}, M={report.M:g}")
    ax.set_ylim(bottom=0)
    return _save(fig, path)


def plot_domain(cloud, path, title=""):
    """Three-dimensional scatter of sampled (M, gamma, Gamma) coloured by case."""
    fig = plt.figure(figsize=(6.0, 5.0))
    ax = fig.add_subplot(projection="3d")
    for case in sorted(set(cloud.cases.tolist())):
        mask = cloud.cases == case
        ax.scatter(cloud.M[mask], cloud.gamma[mask], cloud.Gamma[mask], s=2,
                   color=CASE_COLOURS.get(case, "k"), label=case)
    ax.set_xlabel("M")
    ax.set_ylabel("gamma")
    ax.set_zlabel("Gamma")
    ax.set_title(title)
    if len(cloud):
        ax.legend(frameon=False, markerscale=4)
    return _save(fig, path)


def plot_lifespan(eps, bound, measured, path):
    fig, ax = _figure()
    x = -np.log(np.asarray(eps, float))
    ax.plot(x, bound, "o-", label="lower bound")
    if measured is not None:
        ax.plot(x, measured, "s--", label="measured")
    ax.set_xlabel("-ln eps")
    ax.set_ylabel("t")
    ax.legend(frameon=False)
    return _save(fig, path)
