"""Translation strings and language management"""

from typing import Optional

# Translation strings
TRANSLATIONS = {
    'en': {
        # Common
        'error': 'Error',
        'warning': 'Warning',
        'info': 'Info',
        'success': 'Success',
        'app_title': 'Abelian Integral Toolkit',
        'command': 'Command',
        'parameters': 'Parameters a={a}, b={b}, c={c} ({chart} chart)',
        'user_interrupted': 'Interrupted by user',
        'unexpected_error': 'Unexpected error',

        # Configuration
        'config_loaded': 'Run configuration loaded from {path}',
        'perturbation_loaded': 'Perturbation loaded from {path} (degree {n})',
        'missing_option': 'Option {option} is required for {command}',
        'unknown_command': 'Unknown command: {command}',
        'output_written': 'Output written to {path}',

        # Family
        'region_found': 'Region {region}',
        'critical_found': '{count} critical points',
        'annuli_found': '{count} period annuli',
        'no_annuli': 'No period annulus for these parameters',

        # Orbits and integrals
        'orbit_traced': 'Orbit traced: {n} vertices, closure gap {gap}',
        'quadrature_flagged': 'Quadrature estimate {error} above tolerance',
        'derivative_flagged': 'Finite differences and period quadrature disagree by {gap}',
        'reduction_within_bounds': 'Reduction of I_{i}{j} stays within the degree bounds',
        'reduction_out_of_bounds': 'Reduction of I_{i}{j} exceeds the degree bounds',

        # Picard-Fuchs
        'pf_summary': '{passed}/{total} residuals below {tol}',
        'pf_skipped': '{count} levels skipped near a vanishing denominator',

        # Melnikov
        'annulus_section': 'Annulus {annulus}: h in ({lo}, {hi})',
        'zeros_found': '{count} zeros on annulus {annulus}',
        'identically_zero': 'Melnikov function vanishes identically on annulus {annulus}',
        'tangential_suspected': 'Possible even-multiplicity zeros near h = {levels}',
        'ceiling_respected': 'Ceiling {ceiling} respected',
        'ceiling_violated': 'Ceiling {ceiling} exceeded: {count} zeros',

        # Expansions
        'hopf_coefficients': 'Coefficients at the {center} center',
        'hopf_design_done': 'Three zeros at the {center} center (ε = {epsilon}, {attempts} attempt(s))',
        'constants_done': 'Loop constants A0..A6 computed',
        'constant_deviation': '{name}: computed {value}, published {published}, relative deviation {deviation}',
        'saddle_constant': 'Saddle constant q = {q}',
        'homoclinic_design_done': 'Three zeros of I1 near the loop ({attempts} attempt(s))',
        'outer_count': 'I3 has {count} zero(s) in the same window',
        'distribution_matched': 'Pattern {target} realized',
        'distribution_missed': 'Pattern {target} not realized, found {realized}',
        'distributions_summary': '{matched}/{total} patterns realized',
    },
    'zh': {
        # Common
        'error': '错误',
        'warning': '警告',
        'info': '信息',
        'success': '成功',
        'app_title': 'Abelian 积分工具',
        'command': '命令',
        'parameters': '参数 a={a}, b={b}, c={c}（{chart} 坐标）',
        'user_interrupted': '用户中断',
        'unexpected_error': '意外错误',

        # Configuration
        'config_loaded': '已从 {path} 加载运行配置',
        'perturbation_loaded': '已从 {path} 加载扰动（次数 {n}）',
        'missing_option': '{command} 需要选项 {option}',
        'unknown_command': '未知命令：{command}',
        'output_written': '输出已写入 {path}',

        # Family
        'region_found': '区域 {region}',
        'critical_found': '{count} 个奇点',
        'annuli_found': '{count} 个周期环域',
        'no_annuli': '该参数下没有周期环域',

        # Orbits and integrals
        'orbit_traced': '轨道已追踪：{n} 个顶点，闭合误差 {gap}',
        'quadrature_flagged': '求积误差估计 {error} 超出容差',
        'derivative_flagged': '有限差分与周期求积相差 {gap}',
        'reduction_within_bounds': 'I_{i}{j} 的约化满足次数界',
        'reduction_out_of_bounds': 'I_{i}{j} 的约化超出次数界',

        # Picard-Fuchs
        'pf_summary': '{passed}/{total} 个残差低于 {tol}',
        'pf_skipped': '{count} 个分母接近零的水平被跳过',

        # Melnikov
        'annulus_section': '环域 {annulus}: h ∈ ({lo}, {hi})',
        'zeros_found': '环域 {annulus} 上有 {count} 个零点',
        'identically_zero': '环域 {annulus} 上 Melnikov 函数恒为零',
        'tangential_suspected': 'h = {levels} 附近可能存在偶数重零点',
        'ceiling_respected': '满足上界 {ceiling}',
        'ceiling_violated': '超出上界 {ceiling}：{count} 个零点',

        # Expansions
        'hopf_coefficients': '{center} 中心处的系数',
        'hopf_design_done': '{center} 中心处得到三个零点（ε = {epsilon}，尝试 {attempts} 次）',
        'constants_done': '已计算环常数 A0..A6',
        'constant_deviation': '{name}：计算值 {value}，公布值 {published}，相对偏差 {deviation}',
        'saddle_constant': '鞍点常数 q = {q}',
        'homoclinic_design_done': 'I1 在同宿环附近有三个零点（尝试 {attempts} 次）',
        'outer_count': '同一窗口内 I3 有 {count} 个零点',
        'distribution_matched': '已实现分布 {target}',
        'distribution_missed': '未实现分布 {target}，得到 {realized}',
        'distributions_summary': '已实现 {matched}/{total} 个分布',
    },
}

# Current language (default: English)
_current_language = 'en'


class Translations:
    """Translation manager"""

    @staticmethod
    def get(key: str, language: Optional[str] = None, **kwargs) -> str:
        """Get translated string"""
        lang = language or _current_language
        translations = TRANSLATIONS.get(lang, TRANSLATIONS['en'])
        text = translations.get(key, TRANSLATIONS['en'].get(key, key))

        if kwargs:
            try:
                return text.format(**kwargs)
            except KeyError:
                return text

        return text

    @staticmethod
    def get_available_languages() -> list:
        """Get available languages"""
        return list(TRANSLATIONS.keys())


def get_translator(language: Optional[str] = None):
    """Get translator function"""
    def translate(key: str, **kwargs) -> str:
        return Translations.get(key, language, **kwargs)
    return translate


def set_language(language: str):
    """Set current language"""
    global _current_language
    if language in TRANSLATIONS:
        _current_language = language
    else:
        _current_language = 'en'


def get_language() -> str:
    """Get current language"""
    return _current_language
