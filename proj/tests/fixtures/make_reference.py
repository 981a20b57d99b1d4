"""Builds the statistics fixtures and their reference values.

Run from this directory with numpy, scipy, pandas and statsmodels installed:

    python3 make_reference.py

The reference values come from statsmodels (AnovaRM, OLS type-II sums of
squares) and scipy (F and studentized-range tails), computed along routes
that do not share code or formulas with the C++ engine: per-subject
contrast scores for the mixed design, eigenvalues for epsilon.
"""

import json

import numpy as np
import pandas as pd
import statsmodels.formula.api as smf
from scipy import stats
from statsmodels.stats.anova import AnovaRM, anova_lm

ROOMS = ["anechoic", "office", "lecture", "stairway"]
CHANNELS = [6, 8, 9, 10, 11, 12]


def simulate(rng, n, location, shift, first_id):
    room_eff = np.array([12.0, 2.0, -4.0, -10.0])
    ch_eff = np.array([-8.0, -3.0, 0.0, 2.0, 4.0, 5.0])
    inter = rng.normal(0.0, 2.0, size=(4, 6))
    rows = []
    for s in range(n):
        subj = rng.normal(0.0, 8.0)
        # Subject-specific room slopes with unequal spread break sphericity.
        room_slope = rng.normal(0.0, [1.0, 3.0, 6.0, 9.0])
        ch_slope = rng.normal(0.0, 3.0) * np.linspace(-1.0, 1.0, 6)
        for i, room in enumerate(ROOMS):
            for j, ch in enumerate(CHANNELS):
                rau = 55.0 + shift + room_eff[i] + ch_eff[j] + inter[i, j] + subj + room_slope[i] + ch_slope[j]
                rau += rng.normal(0.0, 6.0)
                pct = float(np.clip(rau - 5.0 + rng.normal(0.0, 2.0), 0.0, 100.0))
                rows.append((f"s{first_id + s:02d}", location, room, ch, rau, pct))
    return rows


def frame(rows):
    return pd.DataFrame(rows, columns=["subject", "location", "room", "channels", "rau", "percent_correct"])


def contrasts(k):
    """Orthonormal basis of the contrasts among k levels (QR of deviation coding)."""
    dev = np.vstack([np.eye(k - 1), -np.ones(k - 1)])
    q, _ = np.linalg.qr(dev)
    return q


def epsilon(cov):
    lam = np.linalg.eigvalsh(cov)
    p = len(lam)
    return min(1.0, max(1.0 / p, lam.sum() ** 2 / (p * (lam ** 2).sum())))


def double_centered_epsilon(s):
    k = s.shape[0]
    centered = s - s.mean(axis=0) - s.mean(axis=1)[:, None] + s.mean()
    return k * k * (np.diag(s).mean() - s.mean()) ** 2 / ((k - 1) * (centered ** 2).sum())


def cube(df, subjects):
    y = np.zeros((len(subjects), 4, 6))
    for r in df.itertuples():
        y[subjects.index(r.subject), ROOMS.index(r.room), CHANNELS.index(r.channels)] = r.rau
    return y


def tukey(means, ms_err, reps, df_err, labels):
    """All pairs; `reps` is the number of scores averaged into each mean."""
    k = len(means)
    out = []
    for x in range(k):
        for y in range(x + 1, k):
            est = means[x] - means[y]
            se = np.sqrt(2.0 * ms_err / reps)
            t = est / se
            out.append({
                "level_a": labels[x], "level_b": labels[y], "estimate": est, "se": se, "df": df_err,
                "t": t, "p_unadjusted": 2.0 * stats.t.sf(abs(t), df_err),
                "p_adjusted": float(stats.studentized_range.sf(np.sqrt(2.0) * abs(t), k, df_err)),
            })
    return out


def rm_reference(df):
    subjects = sorted(df.subject.unique())
    n = len(subjects)
    y = cube(df, subjects)
    long = df.assign(room=pd.Categorical(df.room, ROOMS), channels=df.channels.astype(str))

    aov = AnovaRM(long, "rau", "subject", within=["room", "channels"]).fit().anova_table
    names = {"room": "room", "channels": "channels", "room:channels": "room:channels"}

    ols = smf.ols("rau ~ C(subject) + C(room) * C(channels) + C(subject):C(room) + C(subject):C(channels)",
                  data=long).fit()
    ss = anova_lm(ols, typ=2)
    error_total = (ss.loc["C(subject)", "sum_sq"] + ss.loc["C(subject):C(room)", "sum_sq"]
                   + ss.loc["C(subject):C(channels)", "sum_sq"] + ss.loc["Residual", "sum_sq"])
    effect_ss = {"room": ss.loc["C(room)", "sum_sq"], "channels": ss.loc["C(channels)", "sum_sq"],
                 "room:channels": ss.loc["C(room):C(channels)", "sum_sq"]}

    ca, cb = contrasts(4), contrasts(6)
    ua, ub = np.ones((4, 1)) / 2.0, np.ones((6, 1)) / np.sqrt(6.0)
    flat = y.reshape(n, 24)
    cov = np.cov(flat, rowvar=False)
    eps = {"room": epsilon(np.kron(ca, ub).T @ cov @ np.kron(ca, ub)),
           "channels": epsilon(np.kron(ua, cb).T @ cov @ np.kron(ua, cb)),
           "room:channels": epsilon(np.kron(ca, cb).T @ cov @ np.kron(ca, cb))}

    effects = {}
    for label, name in names.items():
        row = aov.loc[label.replace(":", ":")] if label in aov.index else aov.loc[label]
        f, d1, d2 = float(row["F Value"]), float(row["Num DF"]), float(row["Den DF"])
        e = eps[name] if d1 > 1 else 1.0
        effects[name] = {"F": f, "df_num": d1, "df_den": d2, "p_uncorrected": float(stats.f.sf(f, d1, d2)),
                         "epsilon": e, "p_gg": float(stats.f.sf(f, e * d1, e * d2)),
                         "ges": effect_ss[name] / (effect_ss[name] + error_total)}

    room_marg = y.mean(axis=2)
    ms_room = ss.loc["C(subject):C(room)", "sum_sq"] / ss.loc["C(subject):C(room)", "df"]
    ms_ch = ss.loc["C(subject):C(channels)", "sum_sq"] / ss.loc["C(subject):C(channels)", "df"]
    return {
        "effects": effects,
        "epsilon_room_marginal": double_centered_epsilon(np.cov(room_marg, rowvar=False)),
        "epsilon_room_marginal_eigen": epsilon(ca.T @ np.cov(room_marg, rowvar=False) @ ca),
        "tukey": {
            "room": tukey(y.mean(axis=(0, 2)), ms_room, n * 6, (n - 1) * 3, ROOMS),
            "channels": tukey(y.mean(axis=(0, 1)), ms_ch, n * 4, (n - 1) * 5, [str(c) for c in CHANNELS]),
        },
    }


def stratum(scores, groups):
    """Intercept, group and error sums of squares of multivariate contrast
    scores regressed on group (sequential, intercept first), summed over the
    score columns."""
    n = scores.shape[0]
    ss_int = ss_grp = ss_err = 0.0
    for col in range(scores.shape[1]):
        d = pd.DataFrame({"z": scores[:, col], "g": groups})
        full = smf.ols("z ~ C(g)", data=d).fit()
        ss_err += full.ssr
        ss_int += n * d.z.mean() ** 2
        ss_grp += anova_lm(full, typ=1).loc["C(g)", "sum_sq"]
    return ss_int, ss_grp, ss_err


def mixed_reference(df):
    subjects = sorted(df.subject.unique(), key=lambda s: (df[df.subject == s].location.iloc[0] != "remote", s))
    groups = np.array([df[df.subject == s].location.iloc[0] for s in subjects])
    n, g = len(subjects), 2
    y = cube(df, subjects).reshape(n, 24)
    ca, cb = contrasts(4), contrasts(6)
    ua, ub = np.ones((4, 1)) / 2.0, np.ones((6, 1)) / np.sqrt(6.0)

    def project(basis):
        return y @ basis

    between = project(np.kron(ua, ub))
    d = pd.DataFrame({"z": between[:, 0], "g": groups})
    table = anova_lm(smf.ols("z ~ C(g)", data=d).fit(), typ=1)
    ss_g, ss_eb = table.loc["C(g)", "sum_sq"], table.loc["Residual", "sum_sq"]

    a_int, a_grp, a_err = stratum(project(np.kron(ca, ub)), groups)
    b_int, b_grp, b_err = stratum(project(np.kron(ua, cb)), groups)
    ab_int, ab_grp, ab_err = stratum(project(np.kron(ca, cb)), groups)
    errors = ss_eb + a_err + b_err + ab_err

    # Pooled within-group covariance for epsilon.
    resid = y.copy()
    for grp in set(groups):
        resid[groups == grp] -= y[groups == grp].mean(axis=0)
    sp = resid.T @ resid / (n - g)
    eps_a = epsilon(np.kron(ca, ub).T @ sp @ np.kron(ca, ub))
    eps_b = epsilon(np.kron(ua, cb).T @ sp @ np.kron(ua, cb))
    eps_ab = epsilon(np.kron(ca, cb).T @ sp @ np.kron(ca, cb))

    def effect(ss, d1, err, d2, e):
        f = (ss / d1) / (err / d2)
        return {"F": f, "df_num": d1, "df_den": d2, "p_uncorrected": float(stats.f.sf(f, d1, d2)),
                "epsilon": e, "p_gg": float(stats.f.sf(f, e * d1, e * d2)) if e is not None else None,
                "ges": ss / (ss + errors)}

    dfs = n - g
    effects = {
        "location": effect(ss_g, 1, ss_eb, dfs, None),
        "room": effect(a_int, 3, a_err, 3 * dfs, eps_a),
        "channels": effect(b_int, 5, b_err, 5 * dfs, eps_b),
        "location:room": effect(a_grp, 3, a_err, 3 * dfs, eps_a),
        "location:channels": effect(b_grp, 5, b_err, 5 * dfs, eps_b),
        "room:channels": effect(ab_int, 15, ab_err, 15 * dfs, eps_ab),
        "location:room:channels": effect(ab_grp, 15, ab_err, 15 * dfs, eps_ab),
    }
    means = [between[groups == loc, 0].mean() / np.sqrt(24.0) for loc in ("remote", "in-person")]
    n1, n2 = (groups == "remote").sum(), (groups == "in-person").sum()
    ms = ss_eb / dfs
    est = means[0] - means[1]
    se = np.sqrt(ms / 24.0 * (1.0 / n1 + 1.0 / n2))
    t = est / se
    loc_tukey = [{"level_a": "remote", "level_b": "in-person", "estimate": est, "se": se, "df": dfs, "t": t,
                  "p_unadjusted": 2.0 * stats.t.sf(abs(t), dfs),
                  "p_adjusted": float(stats.studentized_range.sf(np.sqrt(2.0) * abs(t), 2, dfs))}]
    return {"effects": effects, "tukey": {"location": loc_tukey}}


def main():
    rng = np.random.default_rng(20240611)
    remote = frame(simulate(rng, 21, "remote", 0.0, 1))
    in_person = frame(simulate(rng, 9, "in-person", 4.0, 22))
    mixed = pd.concat([remote, in_person], ignore_index=True)

    remote.to_csv("rm_scores.tsv", sep="\t", index=False, float_format="%.17g")
    mixed.to_csv("mixed_scores.tsv", sep="\t", index=False, float_format="%.17g")
    reference = {"rm": rm_reference(remote), "mixed": mixed_reference(mixed)}
    with open("reference.json", "w") as f:
        json.dump(reference, f, indent=1, default=float)


if __name__ == "__main__":
    main()
