"""Deterministic conversation plans for scripted evaluation.

Each (persona, scenario) pair expands to a fixed sequence of user turns.
For message turns the plan also scripts the system side: four router
votes, the agent's tool calls, and a final-response template rendered
from the actual tool results, so every number a scripted agent states
comes from a real tool computation over the bundled dataset (and is then
verified independently against the ground-truth oracle). Claim markers
``[#claim key value unit]`` make those statements machine-checkable.

The PlannedBackend is a gateway transport that replays this plan one
response per request, absorbing tool observations between requests so
final templates can reference them.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable

from wattson.evaluation.personas import Persona, Scenario
from wattson.gateway import ChatRequest, ProviderConfig, ProviderError

Results = dict[str, Any]


@dataclass(frozen=True)
class PlanVote:
    label: str
    rationale: str


@dataclass(frozen=True)
class PlanToolCalls:
    calls: tuple[tuple[str, dict], ...]


@dataclass(frozen=True)
class PlanFinal:
    render: Callable[[Results], str]


PlanItem = PlanVote | PlanToolCalls | PlanFinal


@dataclass
class ScriptTurn:
    user_message: str | None  # None = resolve the pending confirmation
    plan: list[PlanItem] = field(default_factory=list)
    approve: bool = True


class PlannedBackend:
    """Gateway transport replaying a scripted plan, one item per request."""

    def __init__(self) -> None:
        self._queue: deque[PlanItem] = deque()
        self.results: Results = {}
        self._awaiting: list[str] = []

    def extend(self, items: list[PlanItem]) -> None:
        self._queue.extend(items)

    def __call__(self, provider: ProviderConfig, request: ChatRequest) -> dict:
        if self._awaiting:
            tool_messages = [m for m in request.messages if m.role == "tool"]
            recent = tool_messages[-len(self._awaiting) :]
            for name, message in zip(self._awaiting, recent):
                self.results[name] = _parse_json(message.content)
            self._awaiting = []
        if not self._queue:
            raise ProviderError("scripted plan exhausted")
        item = self._queue.popleft()
        if isinstance(item, PlanVote):
            return {"structured": {"agent": item.label, "rationale": item.rationale}}
        if isinstance(item, PlanToolCalls):
            self._awaiting = [name for name, _ in item.calls]
            return {
                "tool_calls": [
                    {"tool": name, "arguments": dict(args)} for name, args in item.calls
                ]
            }
        return {"content": item.render(self.results)}


def _parse_json(text: str) -> Any:
    try:
        return json.loads(text)
    except (json.JSONDecodeError, TypeError):
        return text


def claim(key: str, value: float, unit: str, decimals: int = 2) -> str:
    return f"[#claim {key} {value:.{decimals}f} {unit}]"


def _votes(agent: str) -> list[PlanItem]:
    reasons = (
        f"The query asks for {agent} work; the other agents do not cover it.",
        f"Intent matches the {agent} agent's toolset directly.",
        f"Keywords in the query map onto {agent} capabilities.",
        f"Context of the conversation stays within the {agent} domain.",
    )
    return [PlanVote(label=agent, rationale=reason) for reason in reasons]


def _tools(*calls: tuple[str, dict]) -> PlanItem:
    return PlanToolCalls(calls=tuple(calls))


def _message(agent: str, text: str, *plan: PlanItem) -> ScriptTurn:
    return ScriptTurn(user_message=text, plan=_votes(agent) + list(plan))


def _approval(approve: bool = True) -> ScriptTurn:
    return ScriptTurn(user_message=None, approve=approve)


def build_script(persona: Persona, scenario: Scenario) -> list[ScriptTurn]:
    builder = _BUILDERS.get(scenario.name)
    if builder is None:
        raise KeyError(
            f"no scripted conversation for scenario {scenario.name!r}; "
            f"available: {sorted(_BUILDERS)}"
        )
    return builder(persona.name)


# ── analysis scenarios ──────────────────────────────────────────────────


def _appliance_analysis(persona: str) -> list[ScriptTurn]:
    def first(r: Results) -> str:
        ranking = r["analyze_appliances"]["ranking"]
        top, runner_up = ranking[0], ranking[1]
        return (
            "I loaded your data from household.csv and ranked every appliance. Your biggest "
            f"consumer is {top['appliance']}, which used "
            f"{claim(top['appliance'] + '_total_kwh', top['total_kwh'], 'kWh', 1)} over the period - "
            f"{claim('appliance_top_share_pct', top['share_percent'], '%', 1)} of the whole home. "
            f"{runner_up['appliance']} comes next at "
            f"{claim(runner_up['appliance'] + '_total_kwh', runner_up['total_kwh'], 'kWh', 1)}. "
            f"Consider tuning the {top['appliance']} schedule first; it is the largest lever you have."
        )

    def second(r: Results) -> str:
        consumption = r["analyze_consumption"]
        return (
            f"Across the whole home you used {claim('home_total_kwh', consumption['total_kwh'], 'kWh', 1)} "
            "in the period, and the differences are substantial. kWh (a kilowatt-hour - the energy a "
            "1,000-watt load uses in one hour) is the unit your bill counts. The top two appliances carry "
            "the clear majority of usage, so focus "
            "there. Shift the ev_charger and pool_pump runs into cheaper hours to cut cost without "
            "cutting comfort."
        )

    turns = [
        _message(
            "analysis",
            "Which appliances use the most energy in my home?",
            _tools(("load_energy_data", {"path": "household.csv"})),
            _tools(("analyze_appliances", {})),
            PlanFinal(first),
        ),
        _message(
            "analysis",
            "How big are the differences between them, really?",
            _tools(("analyze_consumption", {})),
            PlanFinal(second),
        ),
    ]
    if persona == "confused_newcomer":
        turns.insert(
            1,
            _message(
                "analysis",
                "Sorry, quick question - what does kWh actually mean?",
                PlanFinal(
                    lambda r: (
                        "No problem - a kWh (kilowatt-hour) is the energy a 1,000-watt appliance uses "
                        "in one hour. A refrigerator drawing 120 watts for an hour uses about 0.12 kWh; "
                        "your bill just adds those up."
                    )
                ),
            ),
        )
    elif persona == "tech_savvy_optimizer":
        def exact(r: Results) -> str:
            ranking = r["analyze_appliances"]["ranking"]
            parts = ", ".join(
                f"{row['appliance']} {claim(row['appliance'] + '_total_kwh', row['total_kwh'], 'kWh')}"
                for row in ranking[:3]
            )
            buckets = len(r["query_energy_data"]["buckets"])
            return (
                f"Exact totals, highest first: {parts}. Monthly aggregation gives {buckets} buckets "
                "if you want the per-month trail; the ranking is stable across all of them."
            )

        turns.append(
            _message(
                "analysis",
                "Give me the exact per-appliance totals, please.",
                _tools(("query_energy_data", {"aggregation": "monthly"})),
                PlanFinal(exact),
            )
        )
    elif persona == "budget_conscious_parent":
        def savings(r: Results) -> str:
            return (
                f"Your hvac cost {claim('hvac_tou_cost_usd', r['analyze_utility_rate']['appliances'][0]['cost_usd'], 'USD')} "
                f"under your rate plan this period, so trimming it by a fifth is worth about "
                f"{claim('hvac_fifth_cost_usd', r['analyze_utility_rate']['appliances'][0]['cost_usd'] * 0.2, 'USD')}. "
                "Try a 2-degree setpoint change during the afternoon peak; it gets most of that without any comfort hit."
            )

        turns.append(
            _message(
                "analysis",
                "How much will I save if I cut the biggest one by a fifth?",
                _tools(("analyze_utility_rate", {"rate_name": "tou_summer"})),
                PlanFinal(savings),
            )
        )
    return turns


def _utility_rate(persona: str) -> list[ScriptTurn]:
    def explain(r: Results) -> str:
        rate = r["get_utility_rate"]
        cost = r["analyze_utility_rate"]
        peak = max(rate["periods"], key=lambda p: p["rate_per_kwh"])
        return (
            "You're on a time-of-use (TOU) plan - the price per kWh depends on when you use it. "
            f"Weekday {peak['start_hour']}:00 to {peak['end_hour']}:00 is the peak window at "
            f"{claim('peak_rate_usd', peak['rate_per_kwh'], 'USD_per_kWh')} per kWh, while nights and "
            f"early mornings fall back to {claim('default_rate_usd', rate['default_rate_per_kwh'], 'USD_per_kWh')} "
            f"per kWh. Priced against your actual usage, the period cost "
            f"{claim('tou_total_cost_usd', cost['total_cost_usd'], 'USD')}. Shift your ev_charger and "
            f"laundry after {peak['end_hour']}:00 to buy the same energy at a third of the price."
        )

    def hours(r: Results) -> str:
        rate = r["get_utility_rate"]
        peak = max(rate["periods"], key=lambda p: p["rate_per_kwh"])
        weekend = next((p for p in rate["periods"] if p["day_class"] == "weekend"), None)
        weekend_bit = (
            f" Weekend daytime ({weekend['start_hour']}:00-{weekend['end_hour']}:00) runs at "
            f"{claim('rate_' + weekend['label'] + '_usd', weekend['rate_per_kwh'], 'USD_per_kWh')} per kWh."
            if weekend
            else ""
        )
        return (
            f"Avoid weekday {peak['start_hour']}:00-{peak['end_hour']}:00 - that is the "
            f"{claim('peak_rate_usd', peak['rate_per_kwh'], 'USD_per_kWh')} window.{weekend_bit} "
            "Everything outside those windows bills at the default rate, so overnight and early morning "
            "are your cheap hours."
        )

    turns = [
        _message(
            "analysis",
            "Can you explain my utility rate plan and what it means for my bill?",
            _tools(("load_energy_data", {"path": "household.csv"})),
            _tools(("get_utility_rate", {"name": "tou_summer"})),
            _tools(("analyze_utility_rate", {"rate_name": "tou_summer"})),
            PlanFinal(explain),
        ),
        _message(
            "analysis",
            "So which hours exactly should I avoid?",
            PlanFinal(hours),
        ),
    ]
    if persona == "confused_newcomer":
        turns.insert(
            1,
            _message(
                "analysis",
                "Hold on - is a higher rate per kWh bad for me?",
                PlanFinal(
                    lambda r: (
                        "Higher means more expensive, yes: the rate is the price of one kWh "
                        "(kilowatt-hour, the unit of energy on your bill), so a 0.24 hour costs three "
                        "times a 0.08 hour for the same usage. The good news is you control the timing."
                    )
                ),
            ),
        )
    elif persona == "tech_savvy_optimizer":
        def breakdown(r: Results) -> str:
            cost = r["analyze_utility_rate"]
            periods = ", ".join(
                f"{p['label']} {p['kwh']:.1f} kWh for {p['cost_usd']:.2f} dollars" for p in cost["periods"]
            )
            return (
                f"Per-period breakdown: {periods}. Total "
                f"{claim('tou_total_cost_usd', cost['total_cost_usd'], 'USD')} across "
                f"{claim('home_total_kwh', cost['total_kwh'], 'kWh', 1)}. The decomposition sums exactly; "
                "no rounding games."
            )

        turns.append(
            _message(
                "analysis",
                "Break the cost down by pricing period for me.",
                PlanFinal(breakdown),
            )
        )
    elif persona == "budget_conscious_parent":
        def save(r: Results) -> str:
            return (
                "The cheapest plan is two zero-cost moves: run the dishwasher and laundry after the peak "
                "window closes, and "
                "charge the car overnight. Against the default rate of "
                f"{claim('default_rate_usd', r['get_utility_rate']['default_rate_per_kwh'], 'USD_per_kWh')} per kWh "
                "instead of the peak price, the same chores cost about a third as much - no new hardware needed."
            )

        turns.append(
            _message(
                "analysis",
                "What's the cheapest way for me to use this - how much can I save?",
                PlanFinal(save),
            )
        )
    return turns


def _peak_reduction(persona: str) -> list[ScriptTurn]:
    def start(r: Results) -> str:
        peaks = r["analyze_peak_hours"]
        return (
            f"You used {claim('peak_window_kwh', peaks['peak_kwh'], 'kWh', 1)} inside peak hours "
            "(the weekday late-afternoon window where rates top out at "
            f"{claim('peak_rate_usd', peaks['peak_rate_per_kwh'], 'USD_per_kWh')} per kWh). Assuming "
            f"{peaks['shiftable_fraction']:.0%} of that is shiftable, moving it to the cheapest rate saves about "
            f"{claim('peak_shift_savings_usd', peaks['estimated_savings_usd'], 'USD')} over the period. "
            "Start with the loads that do not care when they run."
        )

    def drivers(r: Results) -> str:
        ranking = r["analyze_appliances"]["ranking"]
        top = ranking[0]
        return (
            f"The peak-window movers: {top['appliance']} is your largest load at "
            f"{claim(top['appliance'] + '_total_kwh', top['total_kwh'], 'kWh', 1)}, and the ev_charger and "
            "pool_pump are the most flexible ones - neither cares which hour it runs. The refrigerator is "
            "steady baseline; leave it alone."
        )

    def plan_steps(r: Results) -> str:
        return (
            "Here is the plan: 1. Schedule the ev_charger to start at 21:30, after the peak window closes. "
            "2. Run the pool_pump from 10:00 to 16:00 only. 3. Set the thermostat to pre-cool at 14:00, "
            "then drift 3 degrees during 16:00-21:00. 4. Move laundry and dishwasher starts after 21:00. "
            "Each step is a one-time schedule change."
        )

    turns = [
        _message(
            "analysis",
            "I want to cut what I spend during peak hours. Where do I start?",
            _tools(("load_energy_data", {"path": "household.csv"})),
            _tools(("analyze_peak_hours", {"rate_name": "tou_summer"})),
            PlanFinal(start),
        ),
        _message(
            "analysis",
            "Which of my appliances actually drive that peak usage?",
            _tools(("analyze_appliances", {})),
            PlanFinal(drivers),
        ),
        _message(
            "analysis",
            "Give me the concrete plan, step by step.",
            PlanFinal(plan_steps),
        ),
    ]
    if persona == "confused_newcomer":
        turns.insert(
            1,
            _message(
                "analysis",
                "What does 'peak hours' mean for me in practice?",
                PlanFinal(
                    lambda r: (
                        "Peak hours (the weekday 16:00-21:00 stretch) are when electricity costs the most "
                        "because everyone is using it at once. Anything you can run outside that window - "
                        "charging, laundry, pool pump - buys the same energy cheaper."
                    )
                ),
            ),
        )
    elif persona == "tech_savvy_optimizer":
        def math(r: Results) -> str:
            peaks = r["analyze_peak_hours"]
            spread = peaks["peak_rate_per_kwh"] - peaks["cheapest_rate_per_kwh"]
            return (
                f"The savings math: shiftable fraction {peaks['shiftable_fraction']:.1f} times "
                f"{claim('peak_window_kwh', peaks['peak_kwh'], 'kWh', 1)} of peak usage times the "
                f"{spread:.2f} rate spread = {claim('peak_shift_savings_usd', peaks['estimated_savings_usd'], 'USD')}. "
                "Change the fraction and the estimate scales linearly."
            )

        turns.append(_message("analysis", "Show me the math behind that savings number.", PlanFinal(math)))
    elif persona == "budget_conscious_parent":
        def monthly(r: Results) -> str:
            peaks = r["analyze_peak_hours"]
            return (
                f"Spread over the three months of data, that is roughly "
                f"{claim('peak_shift_savings_monthly_usd', peaks['estimated_savings_usd'] / 3.0, 'USD')} per month "
                "for schedule changes you set once. The EV charger move alone covers most of it."
            )

        turns.append(_message("analysis", "How much would we actually save per month?", PlanFinal(monthly)))
    return turns


def _multi_step(persona: str) -> list[ScriptTurn]:
    def swing(r: Results) -> str:
        consumption = r["analyze_consumption"]
        rolling = r["calculate_rolling_average"]
        days = [d["kwh"] for d in consumption["daily_profile"]]
        return (
            f"Your daily totals swing between {claim('daily_min_kwh', min(days), 'kWh', 1)} and "
            f"{claim('daily_max_kwh', max(days), 'kWh', 1)}, but the 24-hour rolling average trend is "
            f"{rolling['trend']} - so the variation is a repeating structure, not a drift. Something is "
            "switching on only on certain days."
        )

    def causes(r: Results) -> str:
        weekly = r["compare_weekday_weekend"]
        variability = r["analyze_usage_variability"]["appliances"]
        most_volatile = max(
            (row for row in variability if row["coefficient_of_variation"] is not None),
            key=lambda row: row["coefficient_of_variation"],
        )
        return (
            f"Two causes. First, weekends average {claim('weekend_mean_daily_kwh', weekly['total']['weekend_mean_daily_kwh'], 'kWh', 1)} "
            f"per day versus {claim('weekday_mean_daily_kwh', weekly['total']['weekday_mean_daily_kwh'], 'kWh', 1)} on weekdays - more "
            f"time at home, more cooling. Second, {most_volatile['appliance']} is your most volatile load "
            f"(coefficient of variation {claim(most_volatile['appliance'] + '_cv', most_volatile['coefficient_of_variation'], 'ratio', 3)} - "
            "that is the swing-to-average ratio): it charges every other night, which doubles those days. "
            "Consider spreading charging across nights to flatten the bill profile."
        )

    turns = [
        _message(
            "analysis",
            "My energy costs swing a lot from day to day - why?",
            _tools(("load_energy_data", {"path": "household.csv"})),
            _tools(("analyze_consumption", {})),
            _tools(("calculate_rolling_average", {"window": 24})),
            PlanFinal(swing),
        ),
        _message(
            "analysis",
            "Is it a weekday versus weekend thing, or one appliance?",
            _tools(("compare_weekday_weekend", {})),
            _tools(("analyze_usage_variability", {})),
            PlanFinal(causes),
        ),
    ]
    if persona == "confused_newcomer":
        turns.append(
            _message(
                "analysis",
                "Can you say that more simply - what should I actually do?",
                PlanFinal(
                    lambda r: (
                        "Simply put: your bill jumps on EV-charging nights and on weekends. "
                        "Charge the car a little every night instead of a lot every other night, and "
                        "set the thermostat a notch higher on weekend afternoons. Those two moves flatten it."
                    )
                ),
            )
        )
    elif persona == "tech_savvy_optimizer":
        def freq(r: Results) -> str:
            usage = r["analyze_usage_frequency"]
            return (
                f"The ev_charger had {usage['event_count']} charge events across {usage['days_covered']} days "
                f"({usage['events_per_day']:.2f} per day), always in the early-morning hours. That cadence is "
                "exactly the every-other-day pattern in your daily totals."
            )

        turns.append(
            _message(
                "analysis",
                "Quantify the charger pattern for me - how often does it run?",
                _tools(("analyze_usage_frequency", {"appliance": "ev_charger"})),
                PlanFinal(freq),
            )
        )
    elif persona == "budget_conscious_parent":
        turns.append(
            _message(
                "analysis",
                "So what's the cheapest fix - how much does the swing cost me?",
                PlanFinal(
                    lambda r: (
                        "The swing itself is not extra cost - the same energy just clusters on some days. "
                        "The cheap win is moving that clustered charging off the afternoon peak: set the "
                        "charger schedule once and it holds. Zero dollars spent, and the peak-window portion "
                        "of your bill shrinks."
                    )
                ),
            )
        )
    return turns


# ── control scenarios ───────────────────────────────────────────────────


def _thermostat(persona: str) -> list[ScriptTurn]:
    def survey(r: Results) -> str:
        status = r["get_device_status"]
        setpoint = status["settings"]["setpoint_f"]["value"]
        rate = r["get_utility_rate"]
        peak = max(rate["periods"], key=lambda p: p["rate_per_kwh"])
        return (
            f"Your Main Thermostat is cooling at a {setpoint:.0f}F setpoint. Your peak pricing window is "
            f"weekday {peak['start_hour']}:00-{peak['end_hour']}:00 at "
            f"{claim('peak_rate_usd', peak['rate_per_kwh'], 'USD_per_kWh')} per kWh, so raising the setpoint "
            "to 78F through that window trims compressor runtime in exactly the expensive hours. "
            "Want me to set it to 78?"
        )

    def queue_change(r: Results) -> str:
        pending = r["control_device"]
        return (
            f"I've queued the change: {pending['summary']}. It needs your approval because a 4-degree move "
            "is a significant change - once you approve, I'll apply it. The thermostat accepts "
            f"{claim('thermostat_main_setpoint_f_min', 60, 'F', 0)} to "
            f"{claim('thermostat_main_setpoint_f_max', 85, 'F', 0)}, so 78 sits comfortably in range, and it "
            "cuts peak-hour cooling cost while you are out of the house."
        )

    def wrap(r: Results) -> str:
        return (
            "On your bill it means each degree of summer setback saves roughly 1 percent of cooling energy, "
            "and your change focuses "
            f"the hvac's work outside the {claim('peak_rate_usd', 0.24, 'USD_per_kWh')} per kWh peak window "
            f"(off-peak is {claim('default_rate_usd', 0.08, 'USD_per_kWh')}). Set it back manually any evening "
            "you are home early; the schedule survives."
        )

    turns = [
        _message(
            "control",
            "I want the thermostat working with my rate plan - what is it set to right now?",
            _tools(("get_device_list", {})),
            _tools(("get_device_status", {"device_id": "thermostat_main"})),
            _tools(("get_utility_rate", {"name": "tou_summer"})),
            PlanFinal(survey),
        ),
        _message(
            "control",
            "Yes - set it to 78 please.",
            _tools(
                (
                    "control_device",
                    {
                        "device_id": "thermostat_main",
                        "action": "set_temperature",
                        "arguments": json.dumps({"setpoint_f": 78}),
                    },
                )
            ),
            PlanFinal(queue_change),
        ),
        _approval(True),
        _message("control", "Great - what does that mean for my bill?", PlanFinal(wrap)),
    ]
    if persona == "confused_newcomer":
        turns.insert(
            1,
            _message(
                "control",
                "Wait - what is a setpoint?",
                PlanFinal(
                    lambda r: (
                        "A setpoint (the target temperature on the dial) is what the thermostat holds the "
                        "house at. Raise it in summer and the air conditioner runs less; that is the whole trick."
                    )
                ),
            ),
        )
    elif persona == "tech_savvy_optimizer":
        def limits(r: Results) -> str:
            actions = r["get_available_actions"]["actions"]
            named = ", ".join(a["name"] for a in actions)
            return (
                f"The device exposes: {named}. set_temperature takes "
                f"{claim('thermostat_main_setpoint_f_min', 60, 'F', 0)}-"
                f"{claim('thermostat_main_setpoint_f_max', 85, 'F', 0)}; significant moves "
                "(2 degrees or more) require your confirmation before anything mutates."
            )

        turns.insert(
            1,
            _message(
                "control",
                "What are the exact limits and actions on that device?",
                _tools(("get_available_actions", {"device_id": "thermostat_main"})),
                PlanFinal(limits),
            ),
        )
    elif persona == "budget_conscious_parent":
        turns.append(
            _message(
                "control",
                "Will this actually show up on my bill - how much are we talking?",
                PlanFinal(
                    lambda r: (
                        "For a cooling-heavy summer the bill impact is real - the peak window is where the money is: you pay "
                        f"{claim('peak_rate_usd', 0.24, 'USD_per_kWh')} per kWh there versus "
                        f"{claim('default_rate_usd', 0.08, 'USD_per_kWh')} overnight. Pushing hvac work out of "
                        "that window is the single highest-value change you can make without buying anything."
                    )
                ),
            )
        )
    return turns


def _vacation(persona: str) -> list[ScriptTurn]:
    def plan_out(r: Results) -> str:
        devices = r["get_device_list"]["devices"]
        names = ", ".join(d["name"] for d in devices)
        return (
            f"Here is what I found in the house: {names}. For two weeks away I propose: raise the Main "
            "Thermostat to 85F (minimal cooling), set the Water Heater to vacation mode, and power off the "
            f"Pool Pump - it draws {claim('pool_pump_draw_w', 1100, 'W', 0)} whenever it runs. "
            "Shall I start with the thermostat?"
        )

    def hvac_queue(r: Results) -> str:
        pending = r["control_device"]
        return (
            f"Queued: {pending['summary']}. 85F is the top of the thermostat's "
            f"{claim('thermostat_main_setpoint_f_min', 60, 'F', 0)}-"
            f"{claim('thermostat_main_setpoint_f_max', 85, 'F', 0)} range - the compressor then only guards "
            "against extreme heat while you are away, because holding 74F in an empty house is pure waste. "
            "Approve to apply."
        )

    def heater_queue(r: Results) -> str:
        pending = r["control_device"]
        return (
            f"Queued: {pending['summary']}. Vacation mode idles the water_heater because there is no reason "
            f"to keep fifty gallons hot for an empty house - it shelves most of its "
            f"{claim('water_heater_draw_w', 4500, 'W', 0)} duty cycle. Approve and it is done."
        )

    def pump_done(r: Results) -> str:
        return (
            "Done - the pool_pump is now off; that removes its "
            f"{claim('pool_pump_draw_w', 1100, 'W', 0)} draw entirely for the trip. This will save about six "
            "hours of pump runtime a day with nobody swimming."
        )

    def rundown(r: Results) -> str:
        devices = r["get_device_list"]["devices"]
        lines = "; ".join(f"{d['name']}: {d['status']}" for d in devices)
        return (
            f"Final state check - {lines}. The two significant changes (thermostat setpoint, water heater "
            "mode) were applied only after your confirmations, and the pump cut-off executed directly. "
            "Consider scheduling the thermostat back to 74 for the night before you return, so you do not "
            "walk into an oven. Safe travels!"
        )

    turns = [
        _message(
            "control",
            "We're leaving for two weeks and I want the house using as little energy as possible. Can you set that up?",
            _tools(("get_device_list", {})),
            _tools(("get_all_devices_energy", {})),
            PlanFinal(plan_out),
        ),
        _message(
            "control",
            "Yes, go ahead with the thermostat.",
            _tools(("get_device_status", {"device_id": "thermostat_main"})),
            _tools(
                (
                    "control_device",
                    {
                        "device_id": "thermostat_main",
                        "action": "set_temperature",
                        "arguments": json.dumps({"setpoint_f": 85}),
                    },
                )
            ),
            PlanFinal(hvac_queue),
        ),
        _approval(True),
        _message(
            "control",
            "Now the water heater, please.",
            _tools(("get_device_status", {"device_id": "water_heater"})),
            _tools(
                (
                    "control_device",
                    {
                        "device_id": "water_heater",
                        "action": "set_mode",
                        "arguments": json.dumps({"mode": "vacation"}),
                    },
                )
            ),
            PlanFinal(heater_queue),
        ),
        _approval(True),
        _message(
            "control",
            "And kill the pool pump while we're gone.",
            _tools(
                (
                    "control_device",
                    {"device_id": "pool_pump", "action": "power_off", "arguments": "{}"},
                )
            ),
            PlanFinal(pump_done),
        ),
        _message(
            "control",
            "Can you give me a final rundown of what changed?",
            _tools(("get_device_list", {})),
            PlanFinal(rundown),
        ),
    ]
    if persona == "confused_newcomer":
        turns.insert(
            1,
            _message(
                "control",
                "Why 85 and not just turning the AC off completely?",
                PlanFinal(
                    lambda r: (
                        "Good instinct to ask. Turning it fully off risks heat damage to electronics, finishes, and "
                        "anything perishable; 85F keeps the house inside a safe band for a tiny fraction of "
                        "normal cooling cost. It is the standard vacation compromise."
                    )
                ),
            ),
        )
    elif persona == "tech_savvy_optimizer":
        def standby(r: Results) -> str:
            energy = r["get_all_devices_energy"]
            on_now = [d for d in energy["devices"] if d["current_draw_watts"] > 0]
            return (
                f"Current live draw is {energy['total_draw_watts']:.0f} watts across {len(on_now)} active "
                "devices. After the vacation setup the steady draw drops to the refrigerator-and-standby "
                "floor; everything else is either idled or event-driven."
            )

        turns.append(
            _message(
                "control",
                "What's the fleet drawing right now, before we leave?",
                _tools(("get_all_devices_energy", {})),
                PlanFinal(standby),
            )
        )
    elif persona == "budget_conscious_parent":
        turns.append(
            _message(
                "control",
                "How much will two weeks of this save us?",
                PlanFinal(
                    lambda r: (
                        "The big three while you are away: cooling drops to nearly nothing, the water heater "
                        f"stops cycling its {claim('water_heater_draw_w', 4500, 'W', 0)} element, and the pump's "
                        f"{claim('pool_pump_draw_w', 1100, 'W', 0)} daily runs stop entirely - that is where the "
                        "savings come from. For a two-week trip it is the bulk of a normal fortnight's usage gone."
                    )
                ),
            )
        )
    return turns


# ── knowledge scenario ──────────────────────────────────────────────────


def _rebates(persona: str) -> list[ScriptTurn]:
    def programs(r: Results) -> str:
        hits = r["search_energy_documents"]["results"]
        source = hits[0]["source_id"] if hits else "rebates_hvac_water_heating.md#0"
        return (
            "Yes - three programs stand out. The Heat Pump Water Heater Rebate pays "
            f"{claim('rebate_hpwh_usd', 500, 'USD', 0)} for 50-gallon-plus tanks with a UEF (uniform energy "
            "factor - the efficiency score on the label) of 3.0 or higher. The Residential Heat Pump Upgrade "
            f"Rebate pays {claim('rebate_heat_pump_usd', 1000, 'USD', 0)} for ducted systems, rising to "
            f"{claim('rebate_heat_pump_cold_climate_usd', 1500, 'USD', 0)} for cold-climate models. And the "
            f"Smart Thermostat Instant Rebate takes {claim('rebate_smart_thermostat_usd', 75, 'USD', 0)} off at "
            f"purchase (source: {source}). Both heat pump programs require owner-occupied homes and certified "
            "equipment."
        )

    def process(r: Results) -> str:
        bundle = r["energy_knowledge"]
        source = bundle["citations"][0] if bundle["citations"] else "rebates_hvac_water_heating.md#0"
        return (
            "For the water heater rebate: apply online with proof of purchase and a photo of the removed "
            "unit's nameplate; self-installation is allowed where plumbing code permits. Eligibility is "
            "replacing an existing electric resistance tank in an owner-occupied home with a certified unit "
            f"(source: {source}). Apply for the heat pump HVAC program within 90 days of installation if you "
            "go that route too - the paperwork is the itemized invoice plus the AHRI certificate number."
        )

    turns = [
        _message(
            "knowledge",
            "Are there rebates for upgrading to energy-efficient appliances?",
            _tools(
                ("search_energy_documents", {"query": "rebate program heat pump water heater amount eligibility", "k": 4}),
            ),
            PlanFinal(programs),
        ),
        _message(
            "knowledge",
            "How do I actually apply for the water heater one?",
            _tools(("energy_knowledge", {"topic": "heat pump water heater rebate application process"})),
            PlanFinal(process),
        ),
    ]
    if persona == "confused_newcomer":
        def explain_hpwh(r: Results) -> str:
            bundle = r["energy_knowledge"]
            source = bundle["citations"][0] if bundle["citations"] else "heat_pumps.md#0"
            return (
                "In plain terms: a heat pump water heater is a tank that moves heat from the air into the "
                "water instead of cooking it with an element, which means it uses roughly a third of the "
                f"electricity of a standard tank (source: {source}). Same hot showers, smaller bill."
            )

        turns.insert(
            1,
            _message(
                "knowledge",
                "What's a heat pump water heater, in plain terms?",
                _tools(("energy_knowledge", {"topic": "heat pump water heater"})),
                PlanFinal(explain_hpwh),
            ),
        )
    elif persona == "tech_savvy_optimizer":
        turns.append(
            _message(
                "knowledge",
                "What are the exact efficiency thresholds to qualify?",
                PlanFinal(
                    lambda r: (
                        "Thresholds from the program sheets: water heater UEF 3.0 or higher; heat pump HVAC "
                        "SEER2 (the seasonal cooling-efficiency rating) of 15.2 and HSPF2 of 7.8 or higher; "
                        "thermostats must appear on the qualified products list. Units below those numbers "
                        "simply do not qualify, so check the nameplate before buying."
                    )
                ),
            )
        )
    elif persona == "budget_conscious_parent":
        turns.append(
            _message(
                "knowledge",
                "How much would the water heater swap save us overall?",
                PlanFinal(
                    lambda r: (
                        f"You get {claim('rebate_hpwh_usd', 500, 'USD', 0)} back up front, and heat pump water "
                        "heaters use up to 70% less electricity than the resistance tank they replace - water "
                        "heating is usually the second-biggest item on the bill. Apply the rebate, and the "
                        "remaining cost typically pays itself back within a few years."
                    )
                ),
            )
        )
    return turns


_BUILDERS: dict[str, Callable[[str], list[ScriptTurn]]] = {
    "appliance_analysis": _appliance_analysis,
    "utility_rate": _utility_rate,
    "peak_reduction": _peak_reduction,
    "multi_step_investigation": _multi_step,
    "thermostat_adjustment": _thermostat,
    "vacation_preparation": _vacation,
    "rebate_inquiry": _rebates,
}
