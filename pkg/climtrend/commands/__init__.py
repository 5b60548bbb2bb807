from climtrend.commands.normality import cmd_normality
from climtrend.commands.regions import cmd_regions
from climtrend.commands.seasonal import cmd_seasonal
from climtrend.commands.trend import cmd_trend
from climtrend.models import Command

COMMANDS = {
    Command.TREND: cmd_trend,
    Command.REGIONS: cmd_regions,
    Command.SEASONAL: cmd_seasonal,
    Command.NORMALITY: cmd_normality,
}
