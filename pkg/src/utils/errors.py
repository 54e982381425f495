'''
kgspec 예외 계층.

``InputError`` 는 잘못된 입력(파일, 인자)에, ``AssumptionError`` 는 입력은
올바르지만 계산 도중 가정(양의 정부호성, b < 1 등)이 깨진 경우에 사용한다.
CLI 는 이 구분으로 종료 코드를 정한다.
'''

__all__ = [
    'KleinGordonError', 'InputError', 'AssumptionError', 'SolverError',
    'DimensionMismatch', 'ValidationError', 'ParseError',
    'KappaOutOfRange', 'KappaMinusNotAboveMinusOne', 'AlphaOutOfRange',
    'NotPositiveDefinite', 'ContractionNotLessThanOne', 'NonRealSpectrum',
    'EmptySpectrum', 'ZeroInSpectrum',
]


class KleinGordonError(Exception):
    '''Base class of every error raised by kgspec.'''


class InputError(KleinGordonError):
    '''Raised when an argument or an input file is invalid.'''


class AssumptionError(KleinGordonError):
    '''Raised when all inputs are well formed but a hypothesis of the
    computation (definiteness, contraction, real spectrum) does not hold.
    '''


class SolverError(KleinGordonError):
    '''Raised when a computed eigenpair fails its residual check.'''


class DimensionMismatch(InputError):
    pass


class ValidationError(InputError):
    pass


class ParseError(InputError):
    '''Model file could not be parsed.

    ``line`` 과 ``field`` 는 알 수 있는 경우에만 채워진다.
    '''
    def __init__(self, msg, line=None, field=None):
        details = []
        if line is not None:
            details.append(f"line {line}")
        if field is not None:
            details.append(f"field '{field}'")
        if details:
            msg = f"{msg} ({', '.join(details)})"
        super().__init__(msg)
        self.line = line
        self.field = field


class KappaOutOfRange(InputError):
    pass


class KappaMinusNotAboveMinusOne(InputError):
    pass


class AlphaOutOfRange(InputError):
    pass


class NotPositiveDefinite(AssumptionError):
    '''Raised when a matrix that must be positive definite is not.

    ``min_eigenvalue`` 는 판정에 사용된 최소 고유값이다.
    '''
    def __init__(self, msg, min_eigenvalue=None):
        super().__init__(msg)
        self.min_eigenvalue = min_eigenvalue


class ContractionNotLessThanOne(AssumptionError):
    def __init__(self, contraction):
        super().__init__(f"contraction b = {contraction:.6g} is not less than one")
        self.contraction = contraction


class NonRealSpectrum(AssumptionError):
    pass


class EmptySpectrum(AssumptionError):
    pass


class ZeroInSpectrum(AssumptionError):
    pass
