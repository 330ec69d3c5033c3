from .adaptrap import AdapTrapResult, TrapConfig, adap_trap
from .rules import trap_rule, trap_rule_nonuniform

__all__ = ["AdapTrapResult", "TrapConfig", "adap_trap", "trap_rule", "trap_rule_nonuniform"]
