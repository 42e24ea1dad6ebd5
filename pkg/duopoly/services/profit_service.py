from duopoly.models.game import UncertaintySet
from duopoly.models.results import ProfitSeries
from duopoly.services.model_service import extremal_payoff, reply_function
from duopoly.utils.errors import InvalidParameters, NegativeInput


def profit_series(U: UncertaintySet, x0: float, n: int = 200, burn: int = 1000) -> ProfitSeries:
    """Profit uncertainty along the diagonal orbit x(t+1) = f(x(t)).

    With constant expectations x_e(t) = x(t-1), so f(x_e(t)) = x(t):
      naivety_gap              f(x_e(t)) - f(x(t))     = x(t) - x(t+1)
      guaranteed_achievable    worst payoff at (x(t), x(t))
      max_guaranteed_expected  worst payoff at (x(t), x_e(t))
      best_possible_expected   best payoff at (x(t), x_e(t))
    """
    if x0 < 0:
        raise NegativeInput(f"initial output must be non-negative, got {x0}")
    if n < 1 or burn < 0:
        raise InvalidParameters(f"need n >= 1 and burn >= 0, got n={n}, burn={burn}")

    f = reply_function(U)
    x = x0
    for _ in range(burn):
        x = f(x)

    # path[k] = x(burn + k), k = 0 .. n + 1
    path = [x]
    for _ in range(n + 1):
        path.append(f(path[-1]))

    series = ProfitSeries(t=[], expectation=[], realized=[], naivety_gap=[],
                          guaranteed_achievable=[], max_guaranteed_expected=[],
                          best_possible_expected=[])
    for k in range(1, n + 1):
        expected, realized, following = path[k - 1], path[k], path[k + 1]
        series.t.append(burn + k)
        series.expectation.append(expected)
        series.realized.append(realized)
        series.naivety_gap.append(realized - following)
        series.guaranteed_achievable.append(extremal_payoff(U, realized, realized, "worst"))
        series.max_guaranteed_expected.append(extremal_payoff(U, realized, expected, "worst"))
        series.best_possible_expected.append(extremal_payoff(U, realized, expected, "best"))
    return series
